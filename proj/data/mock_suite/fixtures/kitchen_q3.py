def answer_question(video, possible_answers):
    script = video.get_script()
    context = {"speech": script}
    return video.choose_option("What does the person fry the onions in?", context, possible_answers)
