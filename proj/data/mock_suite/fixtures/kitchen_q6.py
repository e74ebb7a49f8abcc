def answer_question(video, possible_answers):
    on = video.filter_property("Is the stove on?")
    if on.num_frames > 0 and len(on) > 1:
        return "stove"
    return "nothing"
