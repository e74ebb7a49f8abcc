def answer_question(video, possible_answers):
    party = video.filter_property("Is a party happening?")
    responses = party.video_query("What is on the table?")
    return get_max_key(responses)
