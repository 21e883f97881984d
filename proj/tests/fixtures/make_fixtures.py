#!/usr/bin/env python3
"""Regenerates the test fixtures. Output is deterministic; rerun after edits.

All records here are hand-constructed in the shape of real publisher,
Crossref, OpenCitations and Semantic Scholar responses. They are not
captured responses.
"""
import json
import random
from datetime import date, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent

FIRST = ["Jing", "Wei", "Ana", "Luca", "Maria", "Kenji", "Sara", "Omar", "Lena", "Tomas", "Priya", "Jonas"]
LAST = ["Xu", "Zheng", "Silva", "Rossi", "Garcia", "Sato", "Berg", "Haddad", "Novak", "Kumar", "Meyer", "Costa"]
WORDS = ["catalytic", "monolayer", "quantum", "adaptive", "cellular", "hydrogen", "membrane", "spectral",
         "neural", "coastal", "protein", "thermal", "magnetic", "genomic", "porous", "photonic", "microbial",
         "seismic", "ionic", "viral", "stellar", "polymer", "synaptic", "lattice"]


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def dump(path, obj):
    write(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Renderers (independent of the C++ ones)
# ---------------------------------------------------------------------------

def ris(a, sp, ep=None, issue="1"):
    lines = ["TY  - JOUR"]
    for au in a["authors"]:
        lines.append(f"AU  - {au}")
    lines += [f"TI  - {a['title']}", f"JO  - {a['journal']}", f"VL  - {a['volume']}"]
    if issue is not None:
        lines.append(f"IS  - {issue}")
    lines.append(f"SP  - {sp}")
    if ep is not None:
        lines.append(f"EP  - {ep}")
    lines += [f"PY  - {a['date'].year}", f"DA  - {a['date'].strftime('%Y/%m/%d')}", f"SN  - {a['issn']}",
              f"DO  - {a['doi']}", f"UR  - https://doi.org/{a['doi']}", "ER  - ", ""]
    return "\n".join(lines)


def publisher_json(a, start, end, with_number=False):
    rec = {
        "contentType": "Article",
        "identifier": f"doi:{a['doi']}",
        "language": "en",
        "url": [{"format": "", "platform": "", "value": f"http://dx.doi.org/{a['doi']}"}],
        "title": a["title"],
        "creators": [{"creator": c} for c in a["authors"]],
        "publicationName": a["journal"],
        "openaccess": "true",
        "doi": a["doi"],
        "publisher": "Springer",
        "publicationDate": a["date"].isoformat(),
        "publicationType": "Journal",
        "eIssn": a["issn"],
        "volume": a["volume"],
        "number": "1",
        "genre": ["OriginalPaper", "Article"],
        "startingPage": start,
        "endingPage": end,
        "copyright": "The Author(s)",
        "abstract": "Abstract text.",
    }
    if with_number:
        rec["articleNumber"] = a["number"]
    return json.dumps({"apiMessage": "This JSON was provided by Springer Nature",
                       "query": f"doi:{a['doi']}",
                       "result": [{"total": "1", "start": "1", "pageLength": "10", "recordsDisplayed": "1"}],
                       "records": [rec]}, indent=2, ensure_ascii=False) + "\n"


def jats(a, fpage="1", lpage=None, elocation=True, seq=True):
    d = a["date"]
    contribs = "\n".join(
        f'        <contrib contrib-type="author"><name><surname>{au.split(", ")[0]}</surname>'
        f'<given-names>{au.split(", ")[1]}</given-names></name></contrib>' for au in a["authors"])
    seq_attr = f' seq="{a["number"]}"' if seq else ""
    eloc = f"\n      <elocation-id>{a['number']}</elocation-id>" if elocation else ""
    lp = f"\n      <lpage>{lpage}</lpage>" if lpage else ""
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE article PUBLIC "-//NLM//DTD JATS (Z39.96) Journal Publishing DTD v1.2 20190208//EN" "JATS-journalpublishing1.dtd">
<article xmlns:xlink="http://www.w3.org/1999/xlink" article-type="research-article" dtd-version="1.2">
  <front>
    <journal-meta>
      <journal-title-group><journal-title>{a['journal']}</journal-title></journal-title-group>
      <issn pub-type="epub">{a['issn']}</issn>
    </journal-meta>
    <article-meta>
      <article-id pub-id-type="publisher-id">s{a['number']}</article-id>
      <article-id pub-id-type="doi">{a['doi']}</article-id>
      <title-group><article-title>{a['title']}</article-title></title-group>
      <contrib-group>
{contribs}
      </contrib-group>
      <pub-date pub-type="epub"><day>{d.day:02d}</day><month>{d.month:02d}</month><year>{d.year}</year></pub-date>
      <volume>{a['volume']}</volume>
      <issue{seq_attr}>1</issue>
      <fpage>{fpage}</fpage>{lp}{eloc}
      <counts><page-count count="{a['pages']}"/></counts>
    </article-meta>
  </front>
</article>
"""


def crossref_work(a, cited_by=None, page=None, number=True):
    d = a["date"]
    w = {
        "DOI": a["doi"],
        "type": "journal-article",
        "title": [a["title"]],
        "container-title": [a["journal"]],
        "short-container-title": [a.get("abbrev", a["journal"])],
        "ISSN": [a["issn"]],
        "issn-type": [{"value": a["issn"], "type": "electronic"}],
        "volume": a["volume"],
        "issue": "1",
        "author": [{"given": au.split(", ")[1], "family": au.split(", ")[0], "sequence": "first" if i == 0 else "additional"}
                   for i, au in enumerate(a["authors"])],
        "published-online": {"date-parts": [[d.year, d.month, d.day]]},
        "published": {"date-parts": [[d.year, d.month, d.day]]},
        "issued": {"date-parts": [[d.year, d.month, d.day]]},
        "publisher": "Springer Science and Business Media LLC",
    }
    if number:
        w["article-number"] = a["number"]
    if page:
        w["page"] = page
    if cited_by is not None:
        w["is-referenced-by-count"] = cited_by
    return w


def envelope(work):
    return json.dumps({"status": "ok", "message-type": "work", "message-version": "1.0.0", "message": work},
                      indent=2, ensure_ascii=False) + "\n"


def authors(rng, n=None):
    n = n or rng.randint(1, 4)
    return [f"{rng.choice(LAST)}, {rng.choice(FIRST)}" for _ in range(n)]


def title(rng):
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(4, 8))).capitalize()


# ---------------------------------------------------------------------------
# Worked-example records
# ---------------------------------------------------------------------------

def worked_examples():
    out = ROOT / "records"
    a2193 = {
        "doi": "10.5555/ncomms-frenkel-mos2", "journal": "Nature Communications", "abbrev": "Nat Commun",
        "issn": "2041-1723", "volume": "13", "number": "2193", "pages": 8, "date": date(2022, 4, 22),
        "title": "Frenkel-defected monolayer MoS2 catalysts for efficient hydrogen evolution",
        "authors": ["Xu, J", "Shao, GL", "Tang, X", "Zhou, Z"],
    }
    write(out / "natcomm_2193.ris", ris(a2193, sp="2193"))
    write(out / "natcomm_2193.json", publisher_json(a2193, "1", "8"))
    write(out / "natcomm_2193.xml", jats(a2193, lpage="8"))
    write(out / "natcomm_2193.crossref.json", envelope(crossref_work(a2193, cited_by=120)))

    paged = {
        "doi": "10.5555/nature-fascinating", "journal": "Nature", "issn": "0028-0836", "volume": "777",
        "number": "8888", "pages": 11, "date": date(2100, 3, 4), "title": "Fascinating article title",
        "authors": ["A, Author", "B, Author"],
    }
    write(out / "paged_clean.ris", ris(paged, sp="8888", ep="8898"))
    write(out / "paged_clean.crossref.json",
          envelope(crossref_work(paged, page="8888-8898", number=False)))

    # Article-number record whose JATS and Crossref agree.
    a999 = {
        "doi": "10.5555/ncomms-fascinating", "journal": "Nature Communications", "issn": "2041-1723",
        "volume": "777", "number": "999", "pages": 12, "date": date(2100, 5, 6),
        "title": "Fascinating article title", "authors": ["A, Author", "B, Author"],
    }
    write(out / "natcomm_999.xml", jats(a999, lpage="12"))
    write(out / "natcomm_999.crossref.json", envelope(crossref_work(a999, page="1-12")))

    # Citation counts for one article, three sources.
    feather = {
        "doi": "10.1038/s41467-017-02088-w", "journal": "Nature Communications", "issn": "2041-1723",
        "volume": "9", "number": "1", "pages": 8, "date": date(2018, 1, 9),
        "title": "Structural absorption by barbule microstructures of super black bird of paradise feathers",
        "authors": ["McCoy, Dakota E", "Prum, Richard O"],
    }
    counts = ROOT / "counts"
    write(counts / "crossref_work.json", envelope(crossref_work(feather, cited_by=6476)))
    dump(counts / "opencitations.json", [{"count": "7181"}])
    dump(counts / "semanticscholar.json", {"paperId": "a3f1c0de", "citationCount": 5279})
    dump(counts / "crossref_missing_count.json", {"status": "ok", "message": {"DOI": feather["doi"]}})
    dump(counts / "opencitations_empty.json", [])
    dump(counts / "semanticscholar_missing_count.json", {"paperId": "a3f1c0de"})


# ---------------------------------------------------------------------------
# Twenty articles in four formats
# ---------------------------------------------------------------------------

def asymmetry():
    rng = random.Random(20250102)
    out = ROOT / "asymmetry"
    journals = [("Nature Communications", "2041-1723", "s41467", 2010),
                ("Scientific Reports", "2045-2322", "s41598", 2011),
                ("BMC Public Health", "1471-2458", "s12889", 2001)]
    manifest = []
    for i in range(20):
        name, issn, prefix, first_year = journals[i % 3]
        year = rng.randint(2018, 2025)
        pages = rng.randint(3, 30)
        a = {
            "journal": name, "issn": issn, "volume": str(year - first_year + 1), "pages": pages,
            "date": date(year, rng.randint(1, 12), rng.randint(1, 28)), "title": title(rng),
            "authors": authors(rng),
        }
        # The number must not appear anywhere else in the API payload.
        while True:
            a["number"] = str(rng.randint(100, 9999))
            a["doi"] = f"10.5555/{prefix}.{year}.{i + 1:02d}"
            payload = publisher_json(a, "1", str(pages))
            tokens = set("".join(ch if ch.isalnum() else " " for ch in payload).split())
            if a["number"] not in tokens:
                break
        stem = f"a{i + 1:02d}"
        write(out / f"{stem}.ris", ris(a, sp=a["number"]))
        write(out / f"{stem}.json", publisher_json(a, "1", str(pages)))
        write(out / f"{stem}.xml", jats(a, lpage=str(pages)))
        write(out / f"{stem}.crossref.json", envelope(crossref_work(a, cited_by=rng.randint(0, 300))))
        manifest.append({"stem": stem, "doi": a["doi"], "article_number": a["number"], "page_count": pages})
    dump(out / "manifest.json", manifest)


# ---------------------------------------------------------------------------
# Crossref listings served by the test mock
# ---------------------------------------------------------------------------

def listing_work(rng, journal, issn, volume, number, day, prefix, cited_by, pages=None):
    pages = pages or rng.randint(3, 30)
    a = {"doi": f"10.5555/{prefix}.{volume}.{number}", "journal": journal, "issn": issn, "volume": str(volume),
         "number": str(number), "pages": pages, "date": day, "title": title(rng), "authors": authors(rng)}
    return crossref_work(a, cited_by=cited_by)


def paged_listing():
    rng = random.Random(30)
    works = [listing_work(rng, "Paged Letters", "1111-2222", 3, n, date(2020, 1, 2) + timedelta(days=n // 5),
                          "paged", rng.randint(0, 50)) for n in range(1, 31)]
    rng.shuffle(works)
    dump(ROOT / "listing_paged" / "works.json", works)


def natcomm_v16():
    rng = random.Random(322)
    works = []
    day1 = date(2025, 1, 2)
    works.append(listing_work(rng, "Nature Communications", "2041-1723", 16, 1, day1, "natcomm", 410))
    numbers = list(range(2, 324))
    for n in numbers:
        works.append(listing_work(rng, "Nature Communications", "2041-1723", 16, n, day1, "natcomm",
                                  rng.randint(0, 40)))
    for n in range(324, 380):
        works.append(listing_work(rng, "Nature Communications", "2041-1723", 16, n, day1 + timedelta(days=1),
                                  "natcomm", rng.randint(0, 40)))
    # A late-2024 paper from the previous volume published online in January.
    works.append(listing_work(rng, "Nature Communications", "2041-1723", 15, 11000, day1, "natcomm", 7))
    rng.shuffle(works)
    dump(ROOT / "natcomm_v16" / "works.json", works)


def audit3():
    """Three journals, two to three years each, small same-day clusters."""
    rng = random.Random(3)
    out = ROOT / "audit3"
    works, oc, s2 = [], {}, {}
    journals = [
        ("Scientific Reports", "2045-2322", "srep", 2011, [2019, 2020]),
        ("Nature Communications", "2041-1723", "ncomms", 2010, [2021, 2022, 2023]),
        ("BMC Public Health", "1471-2458", "bmcph", 2001, [2009, 2010, 2013]),
    ]
    config_journals = []
    for name, issn, prefix, first_year, years in journals:
        vols = {}
        for year in years:
            vol = year - first_year + 1
            vols[str(vol)] = year
            start = date(year, 1, 2)
            # Article 1 on the first day; 9 more that day, 12 the next day, 20 later.
            schedule = [start] * 10 + [start + timedelta(days=1)] * 12 + [start + timedelta(days=3)] * 20
            for n, day in enumerate(schedule, start=1):
                base = rng.randint(0, 30)
                cited = base + (400 if n == 1 and year >= 2011 else 0)
                w = listing_work(rng, name, issn, vol, n, day, prefix, cited)
                works.append(w)
                oc[w["DOI"]] = cited + rng.randint(0, 20)
                if not (n == 5 and year == years[0]):  # one DOI unknown to Semantic Scholar
                    s2[w["DOI"]] = max(0, cited - rng.randint(0, 20))
        config_journals.append({"name": name, "volumes": vols})
    rng.shuffle(works)
    dump(out / "works.json", works)
    dump(out / "counts.json", {"opencitations": oc, "semanticscholar": s2})
    dump(out / "config.json", {
        "registry_file": "../../../data/journals.json",
        "journals": config_journals,
        "sources": ["crossref", "opencitations", "semanticscholar"],
        "min_cohort": 15,
        "exclusions_file": "../../../data/exclusions.json",
        "cutoff_year": 2011,
        "workers": 3,
        "contact_email": "audit-tests@example.org",
        "policy": {"max_concurrent_requests": 4, "crossref_interval_ms": 1, "other_interval_ms": 1,
                   "max_retries": 1, "backoff_initial_ms": 1, "cache_ttl_days": 30},
    })


# ---------------------------------------------------------------------------
# Reference scanning
# ---------------------------------------------------------------------------

def scan():
    rng = random.Random(13)
    out = ROOT / "scan"
    base = {"journal": "Nature Communications", "issn": "2041-1723"}
    cands = []

    def add(volume, number, pages, t, day):
        a = dict(base, doi=f"10.5555/natcomm.{volume}.{number}", volume=str(volume), number=str(number),
                 pages=pages, date=day, title=t, authors=authors(rng))
        cands.append(crossref_work(a, page=f"1-{pages}"))

    add(13, 2193, 8, "Frenkel-defected monolayer MoS2 catalysts for efficient hydrogen evolution", date(2022, 4, 22))
    add(13, 8, 12, title(rng), date(2022, 1, 4))
    add(13, 2194, 9, title(rng), date(2022, 4, 22))
    add(11, 3315, 10,
        "Boosting hydrogen evolution on MoS2 via co-confining selenium in surface and cobalt in inner layer",
        date(2020, 7, 3))
    add(11, 10, 14, title(rng), date(2020, 1, 3))
    add(777, 999, 12, "Fascinating article title", date(2100, 5, 6))
    dump(out / "candidates.json", cands)

    write(out / "natcomm_13_8.txt", "Nat Commun 13(1):8\n")
    write(out / "references.txt", "\n".join([
        "Xu J, Shao GL, Tang X, Lv F, Xiang HY, Jing CF, Liu S, Dai S, Li YG, Luo J, Zhou Z (2022) "
        "Frenkel-defected monolayer MoS2 catalysts for efficient hydrogen evolution. Nat Commun 13(1):8",
        "Zheng ZL, Yu L, Gao M, Chen XY, Zhou W, Ma C, Wu LH, Zhu JF, Meng XY, Hu JT, Tu YC, Wu SS, Mao J, "
        "Tian ZQ, Deng DH (2020) Boosting hydrogen evolution on MoS2 via co-confining selenium in surface and "
        "cobalt in inner layer. Nat Commun 11(1):10",
        "Author A, Author B. Fascinating article title. Nature Communications 777, 999 (2100)",
        "Author A, Author B. Fascinating article title. Nature 777, 8888–8898 (2100)",
        "See the supplementary material online for details",
        "",
    ]))
    write(out / "correct.txt", "\n".join([
        "Nat Commun 13, 2193 (2022)",
        "Nat Commun 11, 3315 (2020)",
        "",
    ]))
    write(out / "unknown.txt", "See the supplementary material online for details\n")
    write(out / "empty.txt", "")


def main():
    worked_examples()
    asymmetry()
    paged_listing()
    natcomm_v16()
    audit3()
    scan()


if __name__ == "__main__":
    main()
