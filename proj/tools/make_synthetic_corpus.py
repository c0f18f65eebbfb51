#!/usr/bin/env python3
"""Generate the bundled synthetic corpus (data/synthetic).

Writes <out>/US/<year>/*.xml and <out>/DE/<year>/*.xml in the normalized
schema. Output depends only on --seed.
"""

import argparse
import random
import shutil
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

WORDS = (
    "agency account activity applicant approval asset authority bank board capital claim "
    "company compliance condition consumer contract credit deposit disclosure duty employer "
    "examination exemption filing fund holding institution insurance interest investment "
    "lender liability license loan market member notice obligation officer operator payment "
    "permit person premium program property provider record report reserve risk security "
    "service standard statement subsidiary tax transaction transfer trust vessel worker"
).split()
GLUE = "the a of to for under with shall may any each such by in on".split()

YEARS = [2018, 2019, 2020, 2021]


def sentence(rng, n):
    words = []
    for i in range(n):
        words.append(rng.choice(WORDS) if i % 2 == 0 else rng.choice(GLUE))
    return " ".join(words).capitalize() + "."


def paragraph(rng, sentences=3):
    return " ".join(sentence(rng, rng.randint(10, 16)) for _ in range(sentences))


class Section:
    def __init__(self, key, number, heading, text):
        self.key = key
        self.number = number
        self.heading = heading
        self.text = text
        self.cites = []  # reference phrases appended to the text
        self.tail = ""  # amendments added after the references


def us_titles(rng):
    """Statute titles 5, 7, 9 and regulation titles 12, 14."""
    titles = []
    for t, chapters, doc in ((5, 4, "statute"), (7, 4, "statute"), (9, 3, "statute"),
                             (12, 3, "regulation"), (14, 3, "regulation")):
        chs = []
        for c in range(1, chapters + 1):
            secs = []
            for s in range(1, 8):
                if doc == "statute":
                    number = str(c * 100 + s)
                    key = f"usc{t}_{number}"
                else:
                    number = f"{c * 10}.{s}"
                    key = f"cfr{t}_{c * 10}_{s}"
                secs.append(Section(key, number, f"{rng.choice(WORDS).capitalize()} requirements",
                                    paragraph(rng)))
            chs.append(secs)
        titles.append({"title": t, "doc": doc, "chapters": chs})
    return titles


def cite_us(rng, src_title, target_title, target):
    coll = "U.S.C." if target_title["doc"] == "statute" else "CFR"
    if target_title["title"] == src_title["title"]:
        return f"section {target.number} of this title"
    return f"{target_title['title']} {coll} {target.number}"


def add_us_references(rng, titles):
    flat = [(t, c, s) for t in titles for c, secs in enumerate(t["chapters"]) for s in secs]
    hub_title = titles[0]
    hub = hub_title["chapters"][0][0]  # a definitions section cited widely
    hub.heading = "Definitions"
    for t, c, s in flat:
        if s is hub:
            continue
        same = t["chapters"][c]
        for _ in range(rng.randint(1, 3)):
            target = rng.choice(same)
            if target is not s:
                s.cites.append(cite_us(rng, t, t, target))
        if rng.random() < 0.25:
            tt, _, target = rng.choice(flat)
            if target is not s:
                s.cites.append(cite_us(rng, t, tt, target))
        if rng.random() < 0.3:
            s.cites.append(cite_us(rng, t, hub_title, hub))
    # Regulations implement their enabling statutes.
    for reg, stat in ((titles[3], titles[0]), (titles[4], titles[1])):
        for c, secs in enumerate(reg["chapters"]):
            for s in secs[:3]:
                s.cites.append(cite_us(rng, reg, stat, stat["chapters"][c % len(stat["chapters"])][1]))


def perturb(rng, text, count):
    chars = list(text)
    letters = [i for i, ch in enumerate(chars) if ch.isalpha() and i > 10]
    for i in rng.sample(letters, count):
        chars[i] = "x" if chars[i] != "x" else "q"
    return "".join(chars)


def evolve_us(rng, titles, year_index):
    """Apply one year of edits in place."""
    for t in titles:
        for c, secs in enumerate(t["chapters"]):
            # New section at the end of every chapter.
            last = secs[-1]
            s = len(secs) + 1
            if t["doc"] == "statute":
                number = str((c + 1) * 100 + s)
                key = f"usc{t['title']}_{number}"
            else:
                number = f"{(c + 1) * 10}.{s}"
                key = f"cfr{t['title']}_{(c + 1) * 10}_{s}"
            new = Section(key, number, f"{rng.choice(WORDS).capitalize()} program", paragraph(rng, 2))
            new.cites.append(f"section {last.number} of this title")
            secs.append(new)
            # An amendment that extends a section.
            victim = secs[(year_index + c) % (len(secs) - 1)]
            victim.tail += " " + sentence(rng, 8)
            # A small wording change.
            other = secs[(year_index + c + 2) % (len(secs) - 1)]
            other.text = perturb(rng, other.text, 2)


def us_xml(t):
    tag = "usc" if t["doc"] == "statute" else "cfr"
    coll = "USC" if t["doc"] == "statute" else "CFR"
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<document key="{tag}{t["title"]}" level="title" heading="Title {t["title"]}" doc_type="{t["doc"]}">']
    for c, secs in enumerate(t["chapters"], start=1):
        ck = f'{tag}{t["title"]}_ch{c}'
        if t["doc"] == "statute":
            out.append(f'  <item key="{ck}" level="chapter" heading="Chapter {c}">')
            indent = "    "
        else:
            out.append(f'  <item key="{ck}" level="chapter" heading="Chapter {c}">')
            out.append(f'    <item key="{ck}_pt{c * 10}" level="part" heading="Part {c * 10}">')
            indent = "      "
        for s in secs:
            text = s.text
            if s.cites:
                text += " See " + "; ".join(s.cites) + "."
            text += s.tail
            out.append(f'{indent}<seqitem key="{s.key}" level="section" heading={quoteattr(s.heading)} '
                       f'citekey="{coll}:{t["title"]}:{s.number}">')
            out.append(f"{indent}  <text>{escape(text)}</text>")
            out.append(f"{indent}</seqitem>")
        if t["doc"] == "regulation":
            out.append("    </item>")
        out.append("  </item>")
    out.append("</document>")
    return "\n".join(out) + "\n"


DE_LAWS = [("BGB", "statute", 3), ("KWG", "statute", 2), ("AusbV", "regulation", 2)]


def de_laws(rng):
    laws = []
    for abbrev, doc, books in DE_LAWS:
        bks = []
        n = 1
        for b in range(1, books + 1):
            secs = []
            for _ in range(6):
                secs.append(Section(f"{abbrev.lower()}_{n}", str(n), f"{rng.choice(WORDS).capitalize()}",
                                    paragraph(rng)))
                n += 1
            bks.append(secs)
        laws.append({"abbrev": abbrev, "doc": doc, "books": bks})
    for law in laws:
        for b in law["books"]:
            for s in b:
                target = rng.choice(b)
                if target is not s:
                    s.cites.append(f"§ {target.number}")
                if rng.random() < 0.3:
                    other = rng.choice([x for x in laws if x is not law])
                    t = rng.choice([x for bb in other["books"] for x in bb])
                    s.cites.append(f"§ {t.number} {other['abbrev']}")
    return laws


def de_xml(law):
    a = law["abbrev"]
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<document key="{a.lower()}" level="law" heading="{a}" doc_type="{law["doc"]}">']
    for b, secs in enumerate(law["books"], start=1):
        out.append(f'  <item key="{a.lower()}_b{b}" level="book" heading="Buch {b}">')
        for s in secs:
            text = s.text
            if s.cites:
                text += " Siehe " + "; ".join(s.cites) + "."
            out.append(f'    <seqitem key="{s.key}" level="section" heading={quoteattr(s.heading)} '
                       f'citekey="DE:{a}:{s.number}">')
            out.append(f"      <text>{escape(text)}</text>")
            out.append("    </seqitem>")
        out.append("  </item>")
    out.append("</document>")
    return "\n".join(out) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "synthetic")
    ap.add_argument("--seed", type=int, default=20181231)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    if args.out.exists():
        shutil.rmtree(args.out)

    titles = us_titles(rng)
    add_us_references(rng, titles)
    laws = de_laws(rng)
    for k, year in enumerate(YEARS):
        if k > 0:
            evolve_us(rng, titles, k)
        ydir = args.out / "US" / str(year)
        ydir.mkdir(parents=True)
        for t in titles:
            # Title 9 is missing from the 2019 release and filled forward.
            if t["title"] == 9 and year == 2019:
                continue
            tag = "usc" if t["doc"] == "statute" else "cfr"
            (ydir / f"{tag}{t['title']:02d}.xml").write_text(us_xml(t), encoding="utf-8")
        if year in (2020, 2021):
            ddir = args.out / "DE" / str(year)
            ddir.mkdir(parents=True)
            for law in laws:
                (ddir / f"{law['abbrev'].lower()}.xml").write_text(de_xml(law), encoding="utf-8")


if __name__ == "__main__":
    main()
