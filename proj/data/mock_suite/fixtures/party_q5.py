def answer_question(video, possible_answers):
    cake_clip = video.filter_object("cake")
    if cake_clip.num_frames > 0:
        return "yes"
    return "no"
