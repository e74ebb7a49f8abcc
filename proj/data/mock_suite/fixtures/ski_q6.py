def answer_question(video, possible_answers):
    first = video.trim(0, video.num_frames // 4)
    snowing = first.filter_property("Is it snowing?")
    if snowing.num_frames > first.num_frames // 2:
        return "yes"
    else:
        return "no"
