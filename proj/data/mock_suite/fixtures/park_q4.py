def answer_question(video, possible_answers):
    throwing = video.filter_object("ball")
    responses = throwing.video_query("What is the person throwing?")
    return get_max_key(responses)
