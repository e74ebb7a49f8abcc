def answer_question(video, possible_answers):
    tracks = video.track_objects("dancer")
    return len(tracks)
