def answer_question(video, possible_answers):
    sitting = video.filter_property("Is the person sitting?")
    if sitting.num_frames > 0:
        return "yes"
    return "no"
