def answer_question(video, possible_answers)
    return get_max_key(video.video_query("x"))
