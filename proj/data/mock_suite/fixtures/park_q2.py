def answer_question(video, possible_answers):
    summary = video.get_summary()
    context = {"summary": summary}
    return video.choose_option("What does the person do last?", context, possible_answers)
