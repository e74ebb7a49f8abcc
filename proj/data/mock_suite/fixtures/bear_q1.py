def answer_question(video, possible_answers):
    vid_seg = video.trim(0, len(video) // 4) # consider the start
    bear_seg = vid_seg.filter_object("bear")
    image_context = bear_seg.get_caption(bear_seg.num_frames // 2)
    activity_context = bear_seg.video_query("What is this?")
    context = {"caption": image_context, "activity": activity_context}
    answer = bear_seg.choose_option("how was the toy bear moved to the front?", context, possible_answers)
    return answer
