def answer_question(video, possible_answers):
    caption = video.get_caption(video.num_frames // 2)
    context = {"caption": caption}
    return video.choose_option("Where does this video take place?", context, possible_answers)
