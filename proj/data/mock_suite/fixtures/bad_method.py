def answer_question(video, possible_answers):
    return video.download("x")
