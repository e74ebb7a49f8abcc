def answer_question(video, possible_answers):
    script = video.get_script()
    last = video.get_caption(video.num_frames - 1)
    context = {"speech": script, "last frame": last}
    answer = video.choose_option("What happens after chopping?", context, possible_answers)
    return answer
