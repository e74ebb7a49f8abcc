#!/usr/bin/env python3
"""Writes the synthetic evaluation suite under data/mock_suite.

Output is deterministic; rerun after editing and commit the result.
"""
import json
import math
import os
import random
import shutil
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "mock_suite")


def box(x1, y1, x2, y2):
    return [round(x1, 4), round(y1, 4), round(x2, 4), round(y2, 4)]


def lerp(a, b, t):
    return a + (b - a) * t


def chunk_count(frames, fps):
    return math.ceil(frames / fps)


class World:
    def __init__(self, video_id, fps, frames):
        self.video_id = video_id
        self.fps = fps
        self.n = frames
        self.frames = [
            {"caption": "", "objects": {}, "predicates": {}, "qa": {}, "crop_qa": []} for _ in range(frames)
        ]
        self.chunks = []
        self.transcript = None
        self.llm = []

    def caption(self, fn):
        for i, f in enumerate(self.frames):
            f["caption"] = fn(i)

    def predicate(self, question, fn):
        for i, f in enumerate(self.frames):
            f["predicates"][question] = bool(fn(i))

    def qa(self, question, fn):
        for i, f in enumerate(self.frames):
            f["qa"][question] = fn(i)

    def obj(self, name, fn):
        for i, f in enumerate(self.frames):
            boxes = fn(i) or []
            if boxes:
                f["objects"].setdefault(name, []).extend({"box": b, "score": s} for b, s in boxes)

    def crop_qa(self, fn):
        for i, f in enumerate(self.frames):
            for b, qa in fn(i) or []:
                f["crop_qa"].append({"box": b, "qa": qa})

    def rule(self, contains, response):
        self.llm.append({"contains": contains, "response": response})

    def doc(self):
        frames = []
        for f in self.frames:
            out = {"caption": f["caption"]}
            for key in ("objects", "predicates", "qa", "crop_qa"):
                if f[key]:
                    out[key] = f[key]
            frames.append(out)
        d = {"video_id": self.video_id, "fps": self.fps, "frame_count": self.n, "frames": frames}
        if self.chunks:
            assert len(self.chunks) == chunk_count(self.n, self.fps), self.video_id
            d["chunk_captions"] = self.chunks
        if self.transcript is not None:
            d["transcript"] = self.transcript
        if self.llm:
            d["llm"] = self.llm
        return d


QUESTIONS = []


def ask(qid, video, question, answers, program, qtype=None, options=None):
    rec = {"question_id": qid, "video_id": video, "question": question, "answers": answers}
    if qtype:
        rec["type"] = qtype
    if options:
        assert len(options) == 5
        rec["options"] = options
    QUESTIONS.append((rec, program.strip() + "\n"))


def qa_program(body):
    lines = ["def answer_question(video, possible_answers):"] + ["    " + l for l in body.strip().splitlines()]
    return "\n".join(lines)


# ---------------------------------------------------------------------------


def ski_slope():
    w = World("ski_slope", 10, 40)
    skier = lambda i: 5 <= i <= 34

    def skier_box(i):
        t = (i - 5) / 29
        x = lerp(0.15, 0.65, t)
        y = lerp(0.25, 0.45, t)
        return box(x, y, x + 0.16, y + 0.4)

    def jacket_box(i):
        b = skier_box(i)
        return box(b[0] + 0.02, b[1] + 0.08, b[2] - 0.02, b[1] + 0.22)

    w.caption(lambda i: "a skier going down a snowy slope" if skier(i) else "an empty snowy slope with pine trees")
    w.obj("skier", lambda i: [(skier_box(i), 0.92)] if skier(i) else [])
    w.obj("jacket", lambda i: [(jacket_box(i), 0.81)] if skier(i) else [])
    w.obj("tree", lambda i: [(box(0.0, 0.1, 0.1, 0.6), 0.88)])
    w.crop_qa(lambda i: [(jacket_box(i), {"What color is this jacket?": "black" if i <= 30 else "dark grey"}),
                         (skier_box(i), {"What is this person holding?": "poles"})] if skier(i) else [])
    w.qa("What is the weather like?", lambda i: "snowy" if i % 7 else "cloudy")
    w.qa("What is the person doing?", lambda i: "skiing" if skier(i) else "standing")
    w.qa("What color is this jacket?", lambda i: "white")
    w.qa("What is this person holding?", lambda i: "nothing")
    w.predicate("Is someone skiing?", skier)
    w.predicate("Is it snowing?", lambda i: i < 20)
    w.chunks = ["an empty slope", "a skier appears at the top", "the skier turns left", "the skier reaches the trees"]
    w.rule("Question: Where does this video take place?", "2. The caption mentions a snowy slope.")

    ask("ski_q1", w.video_id, "What color is the skier's jacket?", ["black"], qa_program("""
skier_clip = video.filter_object("skier")
skier_boxes = video.find("skier")
jacket_boxes = skier_clip.find("jacket")
responses = jacket_boxes.video_query("What color is this jacket?", possible_answers)
return get_max_key(responses)
"""), "color")
    ask("ski_q2", w.video_id, "What is the weather like?", ["snowy", "snow"], qa_program("""
responses = video.video_query("What is the weather like?")
return get_max_key(responses)
"""), "weather")
    ask("ski_q3", w.video_id, "What is the person doing?", ["skiing"], qa_program("""
active = video.filter_property("Is someone skiing?")
responses = active.video_query("What is the person doing?", possible_answers)
return get_max_key(responses)
"""), "activity")
    ask("ski_q4", w.video_id, "What is the skier holding?", ["poles"], qa_program("""
skiers = video.find("skier")
responses = skiers.video_query("What is this person holding?")
return get_max_key(responses)
"""), "object")
    ask("ski_q5", w.video_id, "Where does this video take place?", ["ski slope"], qa_program("""
caption = video.get_caption(video.num_frames // 2)
context = {"caption": caption}
return video.choose_option("Where does this video take place?", context, possible_answers)
"""), options=["a beach", "ski slope", "a kitchen", "a forest road", "a stadium"])
    ask("ski_q6", w.video_id, "Is it snowing at the start of the video?", ["yes"], qa_program("""
first = video.trim(0, video.num_frames // 4)
snowing = first.filter_property("Is it snowing?")
if snowing.num_frames > first.num_frames // 2:
    return "yes"
else:
    return "no"
"""), "yesno")
    return w


def party_hall():
    w = World("party_hall", 10, 50)
    party = lambda i: 10 <= i <= 39
    w.caption(lambda i: "people celebrating around a table with a cake" if party(i) else "an empty hall with chairs")
    w.predicate("Is a party happening?", party)
    w.qa("What is the party for?", lambda i: ("wedding" if i % 6 == 0 else "birthday") if party(i) else "graduation")
    w.qa("What is on the table?", lambda i: "a cake." if 15 <= i <= 35 else "plates")
    w.qa("What color are the balloons?", lambda i: "crimson")
    w.obj("balloon", lambda i: [(box(0.1, 0.05, 0.2, 0.2), 0.9), (box(0.7, 0.05, 0.8, 0.2), 0.85)] if party(i) else [])
    w.obj("cake", lambda i: [(box(0.4, 0.5, 0.6, 0.7), 0.77)] if 15 <= i <= 35 else [])
    w.transcript = "Happy birthday to you, happy birthday dear Sam. Now make a wish and blow out the candles!"
    w.chunks = ["an empty hall"] + ["guests arrive and sing"] * 3 + ["someone blows out candles"]
    w.rule("Question: What do the people sing?", "1 - the transcript contains the birthday song")

    ask("party_q1", w.video_id, "What is the party for?", ["birthday"], qa_program("""
party_segment = video.filter_property("Is a party happening?")
responses = party_segment.video_query("What is the party for?", possible_answers)
return get_max_key(responses)
"""), "event")
    ask("party_q2", w.video_id, "What is on the table?", ["cake"], qa_program("""
party = video.filter_property("Is a party happening?")
responses = party.video_query("What is on the table?")
return get_max_key(responses)
"""), "object")
    ask("party_q3", w.video_id, "What color are the balloons?", ["red"], qa_program("""
balloons = video.filter_object("balloon")
responses = balloons.video_query("What color are the balloons?")
return get_max_key(responses)
"""), "color")
    ask("party_q4", w.video_id, "What do the people sing?", ["happy birthday"], qa_program("""
script = video.get_script()
return video.choose_option("What do the people sing?", {"speech": script}, possible_answers)
"""), options=["happy birthday", "the national anthem", "a lullaby", "jingle bells", "nothing"])
    ask("party_q5", w.video_id, "Is there a cake?", ["yes"], qa_program("""
cake_clip = video.filter_object("cake")
if cake_clip.num_frames > 0:
    return "yes"
return "no"
"""), "yesno")
    return w


def kitchen():
    w = World("kitchen", 5, 30)
    chopping = lambda i: i < 12
    w.caption(lambda i: "a person chopping onions on a board" if chopping(i) else "a person frying onions in a pan")
    w.predicate("Is the person chopping?", chopping)
    w.predicate("Is the stove on?", lambda i: i >= 12)
    w.qa("What is the person doing?", lambda i: "chopping" if chopping(i) else "frying")
    w.qa("What vegetable is being cut?", lambda i: "onion" if chopping(i) else "none")
    w.obj("knife", lambda i: [(box(0.5, 0.5, 0.7, 0.55), 0.83)] if chopping(i) else [])
    w.obj("pan", lambda i: [(box(0.3, 0.4, 0.7, 0.7), 0.9)] if not chopping(i) else [])
    w.obj("person", lambda i: [(box(0.2, 0.0, 0.6, 1.0), 0.95)])
    w.transcript = "First we chop the onions, then we fry them slowly in butter until golden."
    w.chunks = ["chopping onions"] * 3 + ["frying onions"] * 3
    w.rule("Question: What does the person fry the onions in?", "2")
    w.rule("Question: What happens after chopping?", "Option 2: the last frame shows a pan.")

    ask("kitchen_q1", w.video_id, "What is the person doing?", ["frying"], qa_program("""
responses = video.video_query("What is the person doing?")
return get_max_key(responses)
"""), "activity")
    ask("kitchen_q2", w.video_id, "What vegetable is being cut?", ["onion"], qa_program("""
cutting = video.filter_property("Is the person chopping?")
responses = cutting.video_query("What vegetable is being cut?")
return get_max_key(responses)
"""), "object")
    ask("kitchen_q3", w.video_id, "What does the person fry the onions in?", ["butter"], qa_program("""
script = video.get_script()
context = {"speech": script}
return video.choose_option("What does the person fry the onions in?", context, possible_answers)
"""), options=["oil", "butter", "water", "wine", "nothing"])
    ask("kitchen_q4", w.video_id, "What tool is used at the start?", ["knife"], qa_program("""
start = video.trim(0, video.num_frames // 2)
knives = start.filter_object("knife")
if knives.num_frames > 0:
    return "knife"
else:
    return "pan"
"""), "object")
    ask("kitchen_q5", w.video_id, "What happens after chopping?", ["the onions are fried"], qa_program("""
script = video.get_script()
last = video.get_caption(video.num_frames - 1)
context = {"speech": script, "last frame": last}
answer = video.choose_option("What happens after chopping?", context, possible_answers)
return answer
"""), options=["the person leaves", "the onions are fried", "the onions are boiled", "a dog arrives",
               "the lights go off"])
    ask("kitchen_q6", w.video_id, "What appliance is turned on?", ["stove"], qa_program("""
on = video.filter_property("Is the stove on?")
if on.num_frames > 0 and len(on) > 1:
    return "stove"
return "nothing"
"""), "object")
    return w


def toy_room():
    w = World("toy_room", 8, 48)

    def bear_box(i):
        t = i / 47
        cx, cy = lerp(0.5, 0.5, t), lerp(0.28, 0.7, t)
        h = lerp(0.15, 0.45, t)
        wd = h * 0.7
        return box(cx - wd / 2, cy - h / 2, cx + wd / 2, cy + h / 2)

    hand = lambda i: 2 <= i <= 25
    w.caption(lambda i: "a hand pushing a toy bear across the floor" if hand(i) else "a toy bear sitting on the floor")
    w.obj("bear", lambda i: [(bear_box(i), 0.9)])
    w.obj("hand", lambda i: [(box(0.3, 0.5, 0.45, 0.7), 0.7)] if hand(i) else [])
    w.qa("What is this?", lambda i: "a toy bear")
    w.chunks = ["a bear far away", "a hand pushes the bear", "the bear moves closer", "the bear moves closer",
                "the bear is near the camera", "the bear sits still"]
    w.rule("Question: how was the toy bear moved to the front?", "2, a hand pushes it forward")

    ask("bear_q1", w.video_id, "How was the toy bear moved to the front?", ["it was pushed by a hand"], """
def answer_question(video, possible_answers):
    vid_seg = video.trim(0, len(video) // 4) # consider the start
    bear_seg = vid_seg.filter_object("bear")
    image_context = bear_seg.get_caption(bear_seg.num_frames // 2)
    activity_context = bear_seg.video_query("What is this?")
    context = {"caption": image_context, "activity": activity_context}
    answer = bear_seg.choose_option("how was the toy bear moved to the front?", context, possible_answers)
    return answer
""", options=["it was thrown", "it was pushed by a hand", "it rolled by itself", "it was carried by a dog",
              "it was not moved"])
    ask("bear_q2", w.video_id, "What toy is in the video?", ["bear"], qa_program("""
responses = video.video_query("What is this?")
return get_max_key(responses)
"""), "object")
    ask("bear_q3", w.video_id, "Is a hand visible?", ["yes"], qa_program("""
hands = video.filter_object("hand")
if len(hands) > 0:
    return "yes"
return "no"
"""), "yesno")
    ask("bear_q4", w.video_id, "How many bears are there?", ["1"], qa_program("""
tracks = video.track_objects("bear")
return len(tracks)
"""), "number")
    return w


def dance_floor():
    w = World("dance_floor", 10, 50)
    rng = random.Random(7)

    def dancer(i, k):
        t = i / 49
        x = lerp(0.05, 0.3, t) if k == 0 else lerp(0.8, 0.55, t)
        y = 0.3 + 0.02 * math.sin(i / 5 + k)
        return box(x, y, x + 0.15, y + 0.4)

    def scores(i):
        s0 = round(0.85 + 0.1 * rng.random(), 3)
        s1 = round(0.85 + 0.1 * rng.random(), 3)
        if 20 <= i <= 22:
            s1 = 0.35  # occluded: only the low-score stage keeps the track alive
        return s0, s1

    table = [scores(i) for i in range(50)]
    w.caption(lambda i: "two people dancing on a white dance floor under colored lights")
    w.obj("dancer", lambda i: [(dancer(i, 0), table[i][0]), (dancer(i, 1), table[i][1])])
    w.obj("person", lambda i: [(dancer(i, 0), table[i][0]), (dancer(i, 1), table[i][1])])
    w.qa("What are the people doing?", lambda i: "dancing")
    w.qa("What color is the floor?", lambda i: "white" if i % 9 else "white.")
    w.predicate("Is music playing?", lambda i: i >= 3)
    w.chunks = ["two people dance"] * 5
    w.rule("Question: What is the setting?", "1")

    ask("dance_q1", w.video_id, "How many people are dancing?", ["2"], qa_program("""
tracks = video.track_objects("dancer")
return len(tracks)
"""), "number")
    ask("dance_q2", w.video_id, "What are the people doing?", ["dancing"], qa_program("""
responses = video.video_query("What are the people doing?")
return get_max_key(responses)
"""), "activity")
    ask("dance_q3", w.video_id, "What is the setting?", ["a dance floor"], qa_program("""
caption = video.get_caption(0)
return video.choose_option("What is the setting?", {"caption": caption}, possible_answers)
"""), options=["a dance floor", "a kitchen", "a ski slope", "a classroom", "a parking lot"])
    ask("dance_q4", w.video_id, "What color is the floor?", ["white"], qa_program("""
responses = video.video_query("What color is the floor?")
return get_max_key(responses)
"""), "color")
    ask("dance_q5", w.video_id, "Is music playing?", ["yes"], qa_program("""
music = video.filter_property("Is music playing?")
if music.num_frames >= len(video) // 2:
    return "yes"
return "no"
"""), "yesno")
    return w


def park_walk():
    w = World("park_walk", 2, 90)
    w.caption(lambda i: ["a person walking a dog on a path", "a person throwing a ball for a dog",
                         "a person sitting on a bench", "a person feeding ducks by a pond"][min(i // 23, 3)])
    w.predicate("Is the person sitting?", lambda i: 50 <= i <= 69)
    w.qa("What animal is with the person?", lambda i: "dog" if i < 70 else "duck" if i % 4 == 0 else "dog")
    w.qa("What is the person throwing?", lambda i: "a ball" if 20 <= i <= 40 else "nothing")
    w.obj("dog", lambda i: [(box(0.6, 0.6, 0.8, 0.85), 0.88)] if i < 80 else [])
    w.obj("ball", lambda i: [(box(0.45, 0.3, 0.5, 0.35), 0.6)] if 20 <= i <= 40 else [])
    w.obj("duck", lambda i: [(box(0.2, 0.7, 0.3, 0.8), 0.8)] if i >= 70 else [])
    phases = ["walks the dog along a path"] * 11 + ["throws a ball for the dog"] * 11 + \
             ["sits on a bench"] * 12 + ["feeds ducks at the pond"] * 11
    w.chunks = ["the person " + p for p in phases]
    w.rule("Paragraph:", "A person walks a dog along a park path, then throws a ball for it. "
                         "Later they rest on a bench. At the end they feed the ducks at the pond.")
    w.rule("Question: What is the overall activity of the person in the video?", "2")
    w.rule("Question: What does the person do last?", "Option 1: they feed the ducks.")
    w.rule("Question: Which animals appear in the video?", "#1")

    summary_mc = lambda q: qa_program(f"""
summary = video.get_summary()
context = {{"summary": summary}}
return video.choose_option("{q}", context, possible_answers)
""")
    ask("park_q1", w.video_id, "What is the overall activity of the person in the video?",
        ["spending time in a park with a dog"], summary_mc("What is the overall activity of the person in the video?"),
        options=["cooking dinner", "spending time in a park with a dog", "driving to work", "swimming",
                 "repairing a bike"])
    ask("park_q2", w.video_id, "What does the person do last?", ["feeds the ducks"],
        summary_mc("What does the person do last?"),
        options=["feeds the ducks", "drives home", "plays tennis", "reads a book", "washes the dog"])
    ask("park_q3", w.video_id, "What animal is with the person?", ["dog"], qa_program("""
responses = video.video_query("What animal is with the person?")
return get_max_key(responses)
"""), "object")
    ask("park_q4", w.video_id, "What does the person throw?", ["ball"], qa_program("""
throwing = video.filter_object("ball")
responses = throwing.video_query("What is the person throwing?")
return get_max_key(responses)
"""), "object")
    ask("park_q5", w.video_id, "Is the person sitting at some point?", ["yes"], qa_program("""
sitting = video.filter_property("Is the person sitting?")
if sitting.num_frames > 0:
    return "yes"
return "no"
"""), "yesno")
    ask("park_q6", w.video_id, "Which animals appear in the video?", ["dog and ducks"],
        summary_mc("Which animals appear in the video?"),
        options=["dog and ducks", "cats", "horses", "only birds", "no animals"])
    return w


# ---------------------------------------------------------------------------

VOCAB = {
    "color": ["black", "red", "white", "blue", "green", "dark grey"],
    "weather": ["snowy", "sunny", "cloudy", "rainy"],
    "activity": ["skiing", "dancing", "frying", "chopping", "standing", "walking"],
    "object": ["cake", "onion", "knife", "pan", "bear", "dog", "ball", "poles", "stove", "duck", "plates"],
    "event": ["birthday", "wedding", "graduation"],
    "yesno": ["yes", "no"],
    "number": ["1", "2", "3", "4"],
}
SYNONYMS = {"crimson": ("red", 0.15), "toy": ("bear", 0.6), "snow": ("snowy", 0.1), "grey": ("dark", 0.3),
            "frying": ("fried", 0.2)}
QUESTION_WORDS = ["what", "color", "jacket", "doing", "party", "how", "many", "weather", "holding", "where",
                  "table", "sing", "moved", "front", "throw", "animal", "sitting", "setting", "music", "tool",
                  "vegetable", "cut", "happens", "after", "last", "activity", "skier", "person", "people",
                  "video", "is", "there", "the"]

POOL = [
    ("What color is the car?", """
def answer_question(video, possible_answers):
    car_clip = video.filter_object("car")
    car_boxes = car_clip.find("car")
    responses = car_boxes.video_query("What color is this car?", possible_answers)
    return get_max_key(responses)
""", "qa"),
    ("What is the party for?", """
def answer_question(video, possible_answers):
    party_segment = video.filter_property("Is a party happening?")
    responses = party_segment.video_query("What is the party for?", possible_answers)
    return get_max_key(responses)
""", "qa"),
    ("What is the person doing?", """
def answer_question(video, possible_answers):
    responses = video.video_query("What is the person doing?", possible_answers)
    return get_max_key(responses)
""", "qa"),
    ("How many cats are there?", """
def answer_question(video, possible_answers):
    tracks = video.track_objects("cat")
    return len(tracks)
""", "qa"),
    ("Is the door open at the end?", """
def answer_question(video, possible_answers):
    ending = video.trim(video.num_frames - video.num_frames // 4, video.num_frames)
    open_frames = ending.filter_property("Is the door open?")
    if open_frames.num_frames > ending.num_frames // 2:
        return "yes"
    return "no"
""", "qa"),
    ("How was the toy bear moved to the front?", """
def answer_question(video, possible_answers):
    vid_seg = video.trim(0, len(video) // 4)
    bear_seg = vid_seg.filter_object("bear")
    image_context = bear_seg.get_caption(bear_seg.num_frames // 2)
    activity_context = bear_seg.video_query("What is this?")
    context = {"caption": image_context, "activity": activity_context}
    answer = bear_seg.choose_option("how was the toy bear moved to the front?", context, possible_answers)
    return answer
""", "multiple_choice"),
    ("Why is the man upset?", """
def answer_question(video, possible_answers):
    script = video.get_script()
    return video.choose_option("Why is the man upset?", {"speech": script}, possible_answers)
""", "multiple_choice"),
    ("What is the main goal of the person?", """
def answer_question(video, possible_answers):
    summary = video.get_summary()
    return video.choose_option("What is the main goal of the person?", {"summary": summary}, possible_answers)
""", "multiple_choice"),
]


def write_embeddings(path):
    rng = random.Random(99)
    dim = 16
    vecs = {}

    def fresh():
        return [rng.gauss(0, 1) for _ in range(dim)]

    tokens = []
    for answers in VOCAB.values():
        for a in answers:
            tokens.extend(a.split())
    tokens.extend(QUESTION_WORDS)
    tokens.extend(["fried", "dark", "ski", "slope", "hand", "dance", "floor", "ducks"])
    for t in tokens:
        if t not in vecs:
            vecs[t] = fresh()
    for word, (target, noise) in SYNONYMS.items():
        vecs[word] = [v + noise * rng.gauss(0, 1) for v in vecs[target]]
    with open(path, "w") as f:
        f.write(f"{len(vecs)} {dim}\n")
        for t in sorted(vecs):
            f.write(t + " " + " ".join(f"{v:.6f}" for v in vecs[t]) + "\n")


def main():
    if os.path.isdir(ROOT):
        shutil.rmtree(ROOT)
    os.makedirs(os.path.join(ROOT, "worlds"))
    os.makedirs(os.path.join(ROOT, "fixtures"))
    worlds = [ski_slope(), party_hall(), kitchen(), toy_room(), dance_floor(), park_walk()]
    for w in worlds:
        with open(os.path.join(ROOT, "worlds", w.video_id + ".json"), "w") as f:
            json.dump(w.doc(), f, indent=1)
            f.write("\n")
    with open(os.path.join(ROOT, "dataset.jsonl"), "w") as f:
        for rec, program in QUESTIONS:
            f.write(json.dumps(rec) + "\n")
            with open(os.path.join(ROOT, "fixtures", rec["question_id"] + ".py"), "w") as p:
                p.write(program)

    # Records whose stored programs are broken, for generation-failure checks.
    broken = [
        ({"question_id": "bad_loop", "video_id": "ski_slope", "question": "What is the person doing?",
          "answers": ["skiing"], "type": "activity"},
         "def answer_question(video, possible_answers):\n    for frame in video:\n        return frame\n"),
        ({"question_id": "bad_method", "video_id": "kitchen", "question": "What is the person doing?",
          "answers": ["frying"], "type": "activity"},
         "def answer_question(video, possible_answers):\n    return video.download(\"x\")\n"),
        ({"question_id": "bad_syntax", "video_id": "party_hall", "question": "What is the party for?",
          "answers": ["birthday"], "type": "event"},
         "def answer_question(video, possible_answers)\n    return get_max_key(video.video_query(\"x\"))\n"),
    ]
    with open(os.path.join(ROOT, "faulty.jsonl"), "w") as f:
        for rec, program in broken:
            f.write(json.dumps(rec) + "\n")
            with open(os.path.join(ROOT, "fixtures", rec["question_id"] + ".py"), "w") as p:
                p.write(program)

    answers = []
    for qtype, items in VOCAB.items():
        answers.extend(items)
    vocab = {"answers": answers, "k": len(answers), "by_type": VOCAB}
    with open(os.path.join(ROOT, "vocab.json"), "w") as f:
        json.dump(vocab, f, indent=1)
        f.write("\n")

    pool = [{"question": q, "program": p.strip() + "\n", "task": t, "split": "train"} for q, p, t in POOL]
    with open(os.path.join(ROOT, "example_pool.json"), "w") as f:
        json.dump(pool, f, indent=1)
        f.write("\n")

    write_embeddings(os.path.join(ROOT, "embeddings.txt"))

    config = {
        "mock_worlds": "worlds",
        "generation": {"mode": "fixture", "fixtures": "fixtures", "example_pool": "example_pool.json"},
        "answer": {"embeddings": "embeddings.txt", "vocab": "vocab.json", "mode": "type_based"},
        "api": {"include": ["get_summary"]},
        "k_examples": 4,
        "sample_frames": 60,
        "workers": 4,
        "max_concurrency": 8,
    }
    with open(os.path.join(ROOT, "config.json"), "w") as f:
        json.dump(config, f, indent=1)
        f.write("\n")
    print(f"{len(QUESTIONS)} questions, {len(worlds)} worlds -> {os.path.normpath(ROOT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
