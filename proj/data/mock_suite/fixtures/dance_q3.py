def answer_question(video, possible_answers):
    caption = video.get_caption(0)
    return video.choose_option("What is the setting?", {"caption": caption}, possible_answers)
