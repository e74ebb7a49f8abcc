def answer_question(video, possible_answers):
    responses = video.video_query("What are the people doing?")
    return get_max_key(responses)
