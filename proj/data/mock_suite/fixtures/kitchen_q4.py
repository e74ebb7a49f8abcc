def answer_question(video, possible_answers):
    start = video.trim(0, video.num_frames // 2)
    knives = start.filter_object("knife")
    if knives.num_frames > 0:
        return "knife"
    else:
        return "pan"
