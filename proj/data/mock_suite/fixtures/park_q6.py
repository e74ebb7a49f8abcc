def answer_question(video, possible_answers):
    summary = video.get_summary()
    context = {"summary": summary}
    return video.choose_option("Which animals appear in the video?", context, possible_answers)
