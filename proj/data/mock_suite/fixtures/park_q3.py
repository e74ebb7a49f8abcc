def answer_question(video, possible_answers):
    responses = video.video_query("What animal is with the person?")
    return get_max_key(responses)
