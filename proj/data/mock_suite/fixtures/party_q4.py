def answer_question(video, possible_answers):
    script = video.get_script()
    return video.choose_option("What do the people sing?", {"speech": script}, possible_answers)
