def answer_question(video, possible_answers):
    hands = video.filter_object("hand")
    if len(hands) > 0:
        return "yes"
    return "no"
