def answer_question(video, possible_answers):
    skiers = video.find("skier")
    responses = skiers.video_query("What is this person holding?")
    return get_max_key(responses)
