def answer_question(video, possible_answers):
    cutting = video.filter_property("Is the person chopping?")
    responses = cutting.video_query("What vegetable is being cut?")
    return get_max_key(responses)
