def answer_question(video, possible_answers):
    active = video.filter_property("Is someone skiing?")
    responses = active.video_query("What is the person doing?", possible_answers)
    return get_max_key(responses)
