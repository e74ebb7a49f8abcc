def answer_question(video, possible_answers):
    responses = video.video_query("What is this?")
    return get_max_key(responses)
