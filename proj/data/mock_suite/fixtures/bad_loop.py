def answer_question(video, possible_answers):
    for frame in video:
        return frame
