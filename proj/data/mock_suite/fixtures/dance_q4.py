def answer_question(video, possible_answers):
    responses = video.video_query("What color is the floor?")
    return get_max_key(responses)
