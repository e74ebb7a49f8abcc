def answer_question(video, possible_answers):
    tracks = video.track_objects("bear")
    return len(tracks)
