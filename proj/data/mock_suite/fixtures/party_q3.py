def answer_question(video, possible_answers):
    balloons = video.filter_object("balloon")
    responses = balloons.video_query("What color are the balloons?")
    return get_max_key(responses)
