"""Builds the bundled toy corpus and an independent oracle of its audit.

Every sentence is built to contain lexicon words of exactly one class (or
none), so its label under the seed lexicon is known by construction; the
script double-checks that with a plain token match. Group statistics come
from numpy/scipy.

    python3 toy_corpus.py
"""
import json
import random
import re

import numpy as np
from scipy import stats

random.seed(7)

def read_lexicon(path):
    text = open(path).read()
    lex = {}
    for key in ("agentic", "communal"):
        body = re.search(key + r"\s*=\s*\[(.*?)\]", text, re.S).group(1)
        lex[key] = re.findall(r'"([^"]+)"', body)
    return lex


LEX = read_lexicon("../../../data/seed_lexicon.toml")
AGENTIC = {w for w in LEX["agentic"] if " " not in w}
COMMUNAL = {w for w in LEX["communal"] if " " not in w}

AGENTIC_T = [
    "{P} led the regional {topic} project for three years.",
    "{P} founded a small {topic} studio in 2015.",
    "{P} won the state award for {topic}.",
    "{P} published two papers on {topic}.",
    "{P} managed a staff of 12 people at Dr. Rivera's clinic.",
    "{P} is an ambitious {prof}.",
    "{P} launched a {topic} program with a budget of 2.5 million dollars.",
    "{P} earned a reputation as a decisive {prof}.",
]
COMMUNAL_T = [
    "{P} helped new colleagues settle in.",
    "{P} volunteers at a local shelter on weekends.",
    "{P} is known as a caring {prof}.",
    "{P} supported students who struggled with {topic}.",
    "{P} is kind and patient with everyone.",
    "{P} mentored young people in the {topic} community.",
    "{P} loves spending time with family.",
]
NEUTRAL_T = [
    "{P} was born in {city}.",
    "{P} studied at the University of {city}.",
    "{P} grew up near the coast.",
    "{P} moved to {city} in 2009.",
]
CITIES = ["Denver", "Austin", "Boston", "Seattle", "Chicago"]
TOPICS = ["nutrition", "painting", "robotics", "journalism", "agriculture"]
PROFS = ["chef", "writer", "engineer", "nurse"]
RACES = ["White", "Black", "Hispanic", "Asian"]
NAMES = {
    ("male", "White"): ["Michael Clark", "James Hill", "William Scott", "Matthew Green", "Christopher Hall"],
    ("female", "White"): ["Emily Clark", "Sarah Hill", "Elizabeth Scott", "Ashley Green", "Jessica Hall"],
    ("male", "Black"): ["Jamal Brooks", "Malik Hayes", "Tyrone Price", "Xavier Reed", "Rashad Bell"],
    ("female", "Black"): ["Jasmine Brooks", "Aaliyah Hayes", "Keisha Price", "Ebony Reed", "Nia Bell"],
    ("male", "Hispanic"): ["Juan Ortiz", "Alejandro Ruiz", "Carlos Vega", "Diego Rios", "Jose Marin"],
    ("female", "Hispanic"): ["Maria Ortiz", "Ana Ruiz", "Sofia Vega", "Gabriela Rios", "Carmen Marin"],
    ("male", "Asian"): ["Wei Chen", "Hiroshi Sato", "Minh Tran", "Raj Patel", "Jae Kim"],
    ("female", "Asian"): ["Mei Chen", "Aiko Sato", "Linh Tran", "Priya Patel", "Ji Kim"],
}
# Probability that a content sentence is agentic, per (gender, race).
P_AGENTIC = {
    ("male", "White"): 0.7, ("male", "Black"): 0.5, ("male", "Hispanic"): 0.55, ("male", "Asian"): 0.6,
    ("female", "White"): 0.45, ("female", "Black"): 0.35, ("female", "Hispanic"): 0.4, ("female", "Asian"): 0.5,
}


def tokens(s):
    return re.findall(r"[a-z0-9]+(?:['\-][a-z0-9]+)*", s.lower())


def label_of(sentence):
    t = tokens(sentence)
    a = sum(w in AGENTIC for w in t)
    c = sum(w in COMMUNAL for w in t)
    assert not (a and c), sentence
    return "agentic" if a > c else "communal"


docs = []
for (gender, race), names in NAMES.items():
    pronoun = "He" if gender == "male" else "She"
    for name in names:
        prof = random.choice(PROFS)
        first = name.split()[0]
        sents, labels = [], []
        intro = random.choice(NEUTRAL_T).format(P=name, city=random.choice(CITIES))
        sents.append(intro)
        labels.append("communal")
        for _ in range(random.randint(3, 6)):
            subj = random.choice([pronoun, first])
            r = random.random()
            if r < 0.15:
                tpl, lab = random.choice(NEUTRAL_T), "communal"
            elif r < 0.15 + 0.85 * P_AGENTIC[(gender, race)]:
                tpl, lab = random.choice(AGENTIC_T), "agentic"
            else:
                tpl, lab = random.choice(COMMUNAL_T), "communal"
            s = tpl.format(P=subj, prof=prof, topic=random.choice(TOPICS), city=random.choice(CITIES))
            sents.append(s)
            labels.append(lab)
        assert [label_of(s) for s in sents] == labels
        docs.append({
            "attrs": {"gender": gender, "race": race, "profession": prof},
            "sentences": sents,
            "labels": labels,
        })

random.shuffle(docs)
for i, d in enumerate(docs):
    d["id"] = f"toy-{i:03d}"
# File order differs from id order on purpose.
file_order = sorted(docs, key=lambda d: (d["attrs"]["race"], d["id"][::-1]))
with open("../../../data/toy_corpus.jsonl", "w") as f:
    for d in file_order:
        f.write(json.dumps({"id": d["id"], "text": " ".join(d["sentences"]), "attrs": d["attrs"]}, ensure_ascii=False) + "\n")


def pct(d):
    n = len(d["labels"])
    a = 100.0 * d["labels"].count("agentic") / n
    return a, 100.0 * (n - d["labels"].count("agentic")) / n


def bandwidth(x):
    sd = np.std(x, ddof=1)
    iqr = np.percentile(x, 75) - np.percentile(x, 25)
    lo = min(sd, iqr / 1.34)
    if lo <= 0:
        lo = max(sd, iqr / 1.34)
    return 0.9 * lo * len(x) ** -0.2


groups = {}
for d in sorted(docs, key=lambda d: d["id"]):
    key = f"gender={d['attrs']['gender']},race={d['attrs']['race']}"
    groups.setdefault(key, []).append(d)

oracle = {"groups": {}, "tests": [], "kde": {}}
for key, members in sorted(groups.items()):
    ps = [pct(d) for d in members]
    gaps = np.array([a - c for a, c in ps])
    avg_a = float(np.mean([a for a, _ in ps]))
    avg_c = float(np.mean([c for _, c in ps]))
    oracle["groups"][key] = {
        "n_docs": len(members),
        "n_sentences": sum(len(d["labels"]) for d in members),
        "avg_pct_agentic": avg_a,
        "avg_pct_communal": avg_c,
        "avg_gap": avg_a - avg_c,
    }
    h = bandwidth(gaps)
    grid = np.linspace(gaps.min() - 4 * h, gaps.max() + 4 * h, 512)
    k = stats.gaussian_kde(gaps, bw_method=h / np.std(gaps, ddof=1))
    oracle["kde"][key] = {"bandwidth": float(h), "grid": grid.tolist(), "density": k.evaluate(grid).tolist()}

for race in sorted(RACES):
    male = f"gender=male,race={race}"
    female = f"gender=female,race={race}"
    gap = lambda key: [pct(d)[0] - pct(d)[1] for d in groups[key]]
    r = stats.ttest_ind(gap(male), gap(female), equal_var=False, alternative="greater")
    oracle["tests"].append({"groups": [male, female], "t": float(r.statistic), "df": float(r.df), "p": float(r.pvalue)})

with open("../toy_corpus_oracle.json", "w") as f:
    json.dump(oracle, f, indent=1, sort_keys=True)
    f.write("\n")
print(len(docs), "docs;", sum(len(d["labels"]) for d in docs), "sentences")
