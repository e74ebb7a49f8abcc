def answer_question(video, possible_answers):
    music = video.filter_property("Is music playing?")
    if music.num_frames >= len(video) // 2:
        return "yes"
    return "no"
