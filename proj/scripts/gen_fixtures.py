#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under fixtures/.

Every statement is assembled from labelled phrases, so gold ABDICO labels
come for free. Output is deterministic (fixed seeds); rerunning rewrites the
committed files byte-for-byte.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"

DOCUMENTS = [
    ("incubator-policy", "Apache Incubator Policy", 45),
    ("community-guide", "Community Guide", 28),
    ("ppmc-guide", "PPMC Guide", 61),
    ("cookbook", "Apache Cookbook", 58),
    ("mentor-guide", "Mentor Guide", 36),
    ("graduation-guide", "Graduation Guide", 51),
    ("retirement-guide", "Retirement Guide", 22),
    ("release-guide", "Release Management Guide", 26),
]

AUTHORITY = ["mentor", "IPMC", "ASF", "champion", "board"]
PARTICIPANT = ["podling", "committer", "PPMC", "contributor", "release manager",
               "community", "member", "project"]
PROPER = {"IPMC", "ASF", "PPMC"}

OBJECTS = {
    "ProjectManagement": ["vote", "release", "records", "report", "mailing list",
                          "decision", "ballot"],
    "Product": ["source code", "artifacts", "binaries", "software"],
    "ProductManagement": ["license", "documentation", "roadmap", "website",
                          "trademarks", "dependencies"],
    "Authority": ["mentors", "IPMC", "board", "ASF"],
    "Participants": ["podling", "committers", "contributors", "community", "PPMC"],
}

AIMS = ["notify", "vote on", "review", "approve", "publish", "sign", "discuss",
        "verify", "maintain", "submit", "announce", "report to", "subscribe to",
        "elect", "nominate", "document", "update", "archive", "follow", "monitor"]

STRONG = ["must", "will", "shall"]
WEAK = ["should", "may", "can"]
PROSCRIPTIVE = ["must not", "will not", "should not", "may not"]

LEADING_CONTEXT = ["During incubation", "Before graduation", "After each release",
                   "If the vote fails", "When requested", "Once a month"]
TRAILING_CONTEXT = ["before graduation", "within two weeks", "on the dev list",
                    "after each release", "at least once a month",
                    "if the vote fails", "in a timely manner", "when requested",
                    "prior to graduation", "during incubation"]
OR_ELSE = ["or face retirement", "or risk removal", "or forfeit the vote",
           "or lose commit access"]


def words(phrase):
    return phrase.split()


def plural(noun):
    if noun in PROPER or noun in ("community", "board"):
        return None
    head = noun.split()[-1]
    return " ".join(noun.split()[:-1] + [head + "s"])


def agent_phrase(rng, noun):
    """Returns (tokens, plural?) for an agent noun with a determiner."""
    if noun in PROPER or noun == "board" or noun == "community":
        return ["the"] + words(noun), False
    if rng.random() < 0.3:
        p = plural(noun)
        det = rng.choice(["", "all", "the"])
        return ([det] if det else []) + words(p), True
    return [rng.choice(["the", "each", "a", "every", "the"])] + words(noun), False


def object_phrase(rng, category):
    noun = rng.choice(OBJECTS[category])
    if noun in PROPER:
        return ["the"] + words(noun)
    det = rng.choice(["the", "the", "a", "each", "their"])
    if noun.endswith("s") and det in ("a", "each"):
        det = "the"
    return [det] + words(noun)


def deontic_tokens(rng, strength, is_plural):
    if strength == "Strong":
        return words(rng.choice(STRONG))
    if strength == "Weak":
        return words(rng.choice(WEAK))
    if strength == "Proscriptive":
        return words(rng.choice(PROSCRIPTIVE))
    return ["are" if is_plural else "is"]


def build_statement(rng, agent_noun, strength, object_category=None,
                    allow_extras=True, deontic=None):
    """Returns (tokens, labels)."""
    toks, labs = [], []

    def add(ts, label):
        toks.extend(ts)
        labs.extend([label] * len(ts))

    lead = allow_extras and rng.random() < 0.2
    if lead:
        add(words(rng.choice(LEADING_CONTEXT)), "C")
        add([","], "NONE")
    agent, is_plural = agent_phrase(rng, agent_noun)
    add(agent, "A")
    if deontic is not None:
        add(words(deontic), "D")
    else:
        add(deontic_tokens(rng, strength, is_plural), "D")
    aim = words(rng.choice(AIMS))
    if strength == "Stative" and deontic is None:
        aim = ["expected", "to"] + aim
    add(aim, "I")
    if object_category is not None:
        add(object_phrase(rng, object_category), "B")
    if allow_extras and rng.random() < 0.4:
        add(words(rng.choice(TRAILING_CONTEXT)), "C")
    if allow_extras and rng.random() < 0.12:
        add([","], "NONE")
        add(words(rng.choice(OR_ELSE)), "O")
    add(["."], "NONE")
    toks[0] = toks[0][0].upper() + toks[0][1:]
    return toks, labs


def join(tokens):
    out = ""
    for i, t in enumerate(tokens):
        if i > 0 and t not in (".", ","):
            out += " "
        out += t
    return out


def weighted(rng, table):
    r = rng.random() * sum(w for _, w in table)
    for value, w in table:
        r -= w
        if r < 0:
            return value
    return table[-1][0]


def random_statement(rng):
    participant = rng.random() < 0.66
    agent = rng.choice(PARTICIPANT if participant else AUTHORITY)
    strength = weighted(rng, [("Strong", 0.55), ("Weak", 0.25),
                              ("Proscriptive", 0.1), ("Stative", 0.1)])
    obj = None
    if rng.random() < 0.85:
        obj = weighted(rng, [("ProjectManagement", 0.35), ("Participants", 0.3),
                             ("Product", 0.15), ("ProductManagement", 0.1),
                             ("Authority", 0.1)])
    return build_statement(rng, agent, strength, obj)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def make_corpus(rng, docs, make):
    statements, gold = [], []
    seen = set()
    for doc_id, title, count in docs:
        k = 0
        while k < count:
            toks, labs = make(rng)
            text = join(toks)
            if text in seen:
                continue
            seen.add(text)
            sid = f"{doc_id}#{k}"
            rec = {"doc_id": doc_id, "statement_id": sid, "text": text}
            if title:
                rec["title"] = title
            statements.append(rec)
            gold.append({"statement_id": sid, "labels": labs})
            k += 1
    return statements, gold


def direction_corpus(rng, authority_split, participant_split):
    """authority_split / participant_split: (must count, may count)."""
    plan = []
    for nouns, (strong, weak) in ((AUTHORITY[:3], authority_split),
                                  (PARTICIPANT[:3], participant_split)):
        plan += [(nouns, "must")] * strong + [(nouns, "may")] * weak
    rng.shuffle(plan)
    statements, gold = [], []
    seen = set()
    k = 0
    for nouns, modal in plan:
        while True:
            obj = rng.choice(["ProjectManagement", "Product", "Participants"])
            toks, labs = build_statement(rng, rng.choice(nouns), None, obj,
                                         allow_extras=False, deontic=modal)
            text = join(toks)
            if text not in seen:
                break
        seen.add(text)
        sid = f"direction#{k}"
        statements.append({"doc_id": "direction", "statement_id": sid, "text": text})
        gold.append({"statement_id": sid, "labels": labs})
        k += 1
    return statements, gold


TAXONOMY = """\
# Category mapping for the bundled fixtures.
# Authority roles: IPMC, mentors, the ASF itself (plus champion and board);
# every other agent is a participant.
default = other

[agents]
mentor = Authority
ipmc = Authority
asf = Authority
champion = Authority
board = Authority
podling = Participant
committer = Participant
ppmc = Participant
contributor = Participant
release manager = Participant
manager = Participant
community = Participant
member = Participant
project = Participant

[objects]
vote = ProjectManagement
release = ProjectManagement
record = ProjectManagement
report = ProjectManagement
list = ProjectManagement
decision = ProjectManagement
ballot = ProjectManagement
code = Product
artifact = Product
binaries = Product
software = Product
license = ProductManagement
documentation = ProductManagement
roadmap = ProductManagement
website = ProductManagement
trademark = ProductManagement
dependencies = ProductManagement
mentor = Authority
ipmc = Authority
board = Authority
asf = Authority
podling = Participants
committer = Participants
contributor = Participants
community = Participants
ppmc = Participants
"""

AGENTS12 = [
    "the mentor", "mentors", "the mentors", "a mentor",
    "the committer", "committers", "new committers", "a committer",
    "the podling", "podlings", "the podlings", "a podling",
]


def main():
    OUT.mkdir(exist_ok=True)

    statements, gold = make_corpus(random.Random(20240301), DOCUMENTS, random_statement)
    write_jsonl(OUT / "asf_like.jsonl", statements)
    write_jsonl(OUT / "gold.jsonl", gold)

    statements, gold = make_corpus(random.Random(7), [("templates", None, 100)],
                                   random_statement)
    write_jsonl(OUT / "templates100.jsonl", statements)
    write_jsonl(OUT / "templates100_gold.jsonl", gold)

    # Equal must:may ratio for both agent groups (N = 63).
    statements, gold = direction_corpus(random.Random(11), (16, 16), (16, 15))
    write_jsonl(OUT / "balanced63.jsonl", statements)
    write_jsonl(OUT / "balanced63_gold.jsonl", gold)

    # Planted 4:1 vs 1:4 imbalance (N = 63).
    statements, gold = direction_corpus(random.Random(12), (25, 6), (6, 26))
    write_jsonl(OUT / "planted63.jsonl", statements)
    write_jsonl(OUT / "planted63_gold.jsonl", gold)

    (OUT / "taxonomy.conf").write_text(TAXONOMY, encoding="utf-8")
    (OUT / "agents12.txt").write_text("\n".join(AGENTS12) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
