"""Independent oracle for the feature-layer fixtures.

Writes `features.conll` (the fixture corpus) and `features_expected.json`
(expected values). Rerun with `python3 features_oracle.py` from this
directory; the Rust test reads both files and compares exactly.

Float sums use a plain left-to-right loop so results are bit-comparable.
"""

import json
import unicodedata

THRESHOLD = 0.72
WINDOW = 1000
RUN_WORDS = 3

# (surface, pos, head, deprel) per token; one list per sentence
HANDWRITTEN = {
    ("f1", "OCN", "-", "NA", "NA"): [
        [("他", "r", 2, "SBV"), ("来", "v", 0, "HED"), ("了", "u", 2, "RAD"), ("。", "wp", 2, "WP")],
        [("你", "r", 2, "SBV"), ("知道", "v", 0, "HED"), ("吗", "u", 2, "RAD"), ("？", "wp", 2, "WP")],
        [("但是", "c", 3, "ADV"), ("GDP", "nz", 3, "SBV"), ("增长", "v", 0, "HED"),
         ("很", "d", 5, "ADV"), ("快", "a", 3, "CMP"), ("！", "wp", 3, "WP")],
        [("中国", "ns", 2, "ATT"), ("经济", "n", 3, "SBV"), ("稳定", "a", 0, "HED"),
         ("，", "wp", 3, "WP"), ("人民", "n", 6, "SBV"), ("满意", "v", 3, "COO"), ("。", "wp", 3, "WP")],
    ],
    ("f2", "NMT", "NGT", "Foreign", "NA"): [
        [("报告", "n", 2, "SBV"), ("称", "v", 0, "HED"), ("，", "wp", 2, "WP"),
         ("the", "x", 7, "ATT"), ("quick", "x", 7, "ATT"), ("brown", "x", 7, "ATT"),
         ("fox", "x", 8, "SBV"), ("jumps", "x", 2, "VOB"), ("。", "wp", 2, "WP")],
        [("WTO", "j", 2, "SBV"), ("表示", "v", 0, "HED"), ("欢迎", "v", 2, "VOB"), ("。", "wp", 2, "WP")],
        [("他们", "r", 3, "SBV"), ("已经", "d", 3, "ADV"), ("离开", "v", 0, "HED"), ("……", "wp", 3, "WP")],
    ],
    ("f3", "LLM", "LCG", "Foreign", "Generic"): [
        [("AI", "nz", 2, "SBV"), ("改变", "v", 0, "HED"), ("世界", "n", 2, "VOB"), ("。", "wp", 2, "WP")],
    ],
}

WORDS = ["我们", "发展", "经济", "社会", "人民", "国家", "改革", "合作", "世界", "建设", "创新",
         "政策", "市场", "企业", "技术", "文化", "教育", "环境", "安全", "未来", "城市", "农村",
         "科学", "历史", "question", "data", "的", "了", "在", "和"]
POS = ["r", "v", "n", "n", "n", "n", "v", "v", "n", "v", "v",
       "n", "n", "n", "n", "n", "n", "n", "a", "nt", "n", "n",
       "n", "n", "x", "x", "u", "u", "p", "c"]


def lcg(seed):
    state = seed
    while True:
        state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        yield state >> 33


def generated_doc(seed, n_sent):
    rng = lcg(seed)
    sentences = []
    for _ in range(n_sent):
        length = 5 + next(rng) % 20
        toks = []
        for i in range(length):
            # skewed choice so words repeat
            r = next(rng) % 1000
            k = int((r / 1000.0) ** 2 * len(WORDS))
            toks.append([WORDS[k], POS[k], 0, ""])
        root = next(rng) % length
        for i, t in enumerate(toks):
            if i == root:
                t[2], t[3] = 0, "HED"
            else:
                # head is a neighbour at distance 1..3 toward the root side
                step = 1 + next(rng) % 3
                h = max(i - step, root) if i > root else min(i + step, root)
                t[2], t[3] = h + 1, ["SBV", "VOB", "ATT", "ADV"][next(rng) % 4]
        toks.append(["。", "wp", root + 1, "WP"])
        sentences.append([tuple(t) for t in toks])
    return sentences


DOCS = dict(HANDWRITTEN)
DOCS[("g1", "LLM", "LKM", "China", "Generic")] = generated_doc(11, 150)
DOCS[("g2", "NMT", "NBD", "China", "NA")] = generated_doc(29, 40)


def char_class(c):
    if "a" <= c.lower() <= "z":
        return "latin"
    if "0" <= c <= "9":
        return "digit"
    if "一" <= c <= "鿿":
        return "han"
    if unicodedata.category(c).startswith("P"):
        return "punct"
    return "other"


def script(surface):
    classes = {char_class(c) for c in surface}
    return classes.pop() if len(classes) == 1 else "mixed"


def loop_sum(xs):
    s = 0.0
    for x in xs:
        s += x
    return s


def ttr(tokens):
    return len(set(tokens)) / len(tokens) if tokens else 0.0


def sttr(tokens):
    if len(tokens) < WINDOW:
        return ttr(tokens)
    vals = [ttr(tokens[i:i + WINDOW]) for i in range(0, len(tokens) - WINDOW + 1, WINDOW)]
    return loop_sum(vals) / len(vals)


def mtld_pass(tokens):
    factors = 0.0
    seen = set()
    count = 0
    for t in tokens:
        seen.add(t)
        count += 1
        if len(seen) / count < THRESHOLD:
            factors += 1.0
            seen = set()
            count = 0
    if count:
        factors += (1.0 - len(seen) / count) / (1.0 - THRESHOLD)
    return len(tokens) / factors if factors > 0 else float(len(tokens))


def mtld(tokens):
    if not tokens:
        return 0.0
    return (mtld_pass(tokens) + mtld_pass(tokens[::-1])) / 2.0


def mean(xs):
    return loop_sum(xs) / len(xs) if xs else 0.0


def pstd(xs):
    if len(xs) < 2:
        return 0.0
    m = mean(xs)
    return (loop_sum([(x - m) ** 2 for x in xs]) / len(xs)) ** 0.5


def doc_features(sentences):
    tokens = [t for s in sentences for t in s]
    words = [t[0] for t in tokens if script(t[0]) != "punct"]
    out = {"TTR": ttr(words), "STTR": sttr(words), "MTLD": mtld(words)}
    lengths = [float(len(s)) for s in sentences]
    out["Words per sentence"] = mean(lengths)
    out["Characters per sentence"] = sum(len(t[0]) for t in tokens) / len(sentences)
    out["SentLengthStd"] = pstd(lengths)
    dist, non_root = 0, 0
    for s in sentences:
        for i, t in enumerate(s, start=1):
            if t[2] != 0:
                dist += abs(i - t[2])
                non_root += 1
    out["Mean Dependency Distance"] = dist / non_root if non_root else 0.0
    out["Average Number of Children per Node"] = non_root / len(tokens)

    def longest_latin(s):
        best = run = 0
        for t in s:
            run = run + 1 if script(t[0]) == "latin" else 0
            best = max(best, run)
        return best

    incomplete = sum(1 for s in sentences if longest_latin(s) > RUN_WORDS)
    out["completeness"] = 1.0 - incomplete / len(sentences)
    latin = sum(1 for t in tokens for c in t[0] if char_class(c) == "latin")
    han = sum(1 for t in tokens for c in t[0] if char_class(c) == "han")
    out["foreignness"] = latin / max(han, 1)
    switching = sum(1 for s in sentences
                    if any(script(t[0]) == "han" for t in s) and any(script(t[0]) == "latin" for t in s))
    out["code_switching"] = switching / len(sentences)
    abbrev = sum(1 for t in tokens
                 if script(t[0]) == "latin" and 2 <= len(t[0]) <= 6 and t[0].isupper())
    out["abbreviation"] = abbrev / len(tokens)
    latin_tokens = sum(1 for t in tokens if script(t[0]) == "latin")
    out["untranslated"] = latin_tokens / len(words) if words else 0.0
    return out


def gram_counts(sentence_lists):
    counts = [{}, {}, {}]
    totals = [0, 0, 0]
    for sentences in sentence_lists:
        for s in sentences:
            tags = [t[1] for t in s]
            for n in (1, 2, 3):
                for i in range(len(tags) - n + 1):
                    g = " ".join(tags[i:i + n])
                    counts[n - 1][g] = counts[n - 1].get(g, 0) + 1
                    totals[n - 1] += 1
    return counts, totals


def frequencies(sentence_lists):
    counts, totals = gram_counts(sentence_lists)
    return {str(n): {g: c / totals[n - 1] for g, c in sorted(counts[n - 1].items())} for n in (1, 2, 3)}


def write_conll(path):
    with open(path, "w", encoding="utf-8") as f:
        f.write("# feature-layer fixture; generated by features_oracle.py\n")
        for (doc_id, origin, engine, region, kind), sentences in DOCS.items():
            f.write(f"#doc {doc_id}\t{origin}\t{engine}\t{region}\t{kind}\n")
            for s in sentences:
                for i, (surface, pos, head, rel) in enumerate(s, start=1):
                    f.write(f"{i}\t{surface}\t{pos}\t{head}\t{rel}\n")
                f.write("\n")


def main():
    write_conll("features.conll")
    expected = {
        "documents": {key[0]: doc_features(s) for key, s in DOCS.items()},
        "corpus_profile": frequencies(list(DOCS.values())),
        "document_profiles": {key[0]: frequencies([s]) for key, s in DOCS.items()},
    }
    with open("features_expected.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, ensure_ascii=False, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
