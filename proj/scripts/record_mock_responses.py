#!/usr/bin/env python3
"""Populate fixtures/mock/ for the hermetic pipeline runs.

Runs the CLI against the fixture datasets with an (initially incomplete) mock
manifest, collects the dumped prompt misses, classifies each one by template
phrase plus an instance marker, and writes the canned reply it should get.
Iterates until a full run produces no misses. Replies live in this file, so
re-running from an empty fixtures/mock/ reproduces the directory exactly.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
MOCK = ROOT / "fixtures" / "mock"
BIN = ROOT / "build" / "logt"
FIXTURES = ROOT / "fixtures" / "fixtures10.jsonl"
MINI = ROOT / "fixtures" / "mini.jsonl"

INSTANCES = {}
for line in FIXTURES.read_text().splitlines():
    row = json.loads(line)
    INSTANCES[row["id"]] = row
MINI_IDS = [json.loads(l)["id"] for l in MINI.read_text().splitlines()]


def fence(tag, body):
    return f"```{tag}\n{body}\n```"


def jfence(obj):
    return fence("json", json.dumps(obj, indent=2))


# --- per-instance symbolic contexts ---

SYMCTX = {
    "lib-01": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "members may borrow books"},
                {"id": "r2", "kind": "rule", "label": "overdue items block borrowing"},
                {"id": "c1", "kind": "condition", "label": "no overdue items outstanding"},
            ],
            "edges": [
                {"from": "r2", "relation": "overrides", "to": "r1"},
                {"from": "r1", "relation": "has_condition", "to": "c1"},
            ],
        },
        "triples": [
            {"subject": "dana", "predicate": "is", "object": "member"},
            {"subject": "dana", "predicate": "has_overdue_items", "object": "none"},
            {"subject": "dana", "predicate": "requests", "object": "third_book"},
        ],
        "nl_queries": ["Does Dana currently qualify to borrow another book?"],
    },
    "av-02": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "drones must not fly above four hundred feet"},
                {"id": "c1", "kind": "condition", "label": "altitude above four hundred feet"},
            ],
            "edges": [{"from": "r1", "relation": "has_condition", "to": "c1"}],
        },
        "triples": [
            {"subject": "apex_drone", "predicate": "is", "object": "drone"},
            {"subject": "apex_drone", "predicate": "altitude", "object": "six_hundred_feet"},
            {"subject": "six_hundred_feet", "predicate": "exceeds", "object": "four_hundred_feet"},
        ],
        "nl_queries": ["Did the Apex drone stay at or below the altitude limit?"],
    },
    "med-03": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule",
                 "label": "chest pain requires an electrocardiogram within ten minutes"},
            ],
            "edges": [],
        },
        "triples": [
            {"subject": "patient_one", "predicate": "reports", "object": "chest_pain"},
            {"subject": "patient_one", "predicate": "arrived_at", "object": "two_pm"},
        ],
        "nl_queries": ["Must an electrocardiogram be recorded for the arriving patient?"],
    },
    "visa-04": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "visitors may stay up to ninety days"},
                {"id": "e1", "kind": "exception", "label": "visa states a shorter period"},
            ],
            "edges": [{"from": "r1", "relation": "has_exception", "to": "e1"}],
        },
        "triples": [
            {"subject": "mireille", "predicate": "is", "object": "visitor"},
            {"subject": "mireille", "predicate": "entered_on", "object": "march_first"},
        ],
        "nl_queries": ["Does Mireille's visa state a shorter stay period?"],
    },
    "lease-05": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "tenants shall not keep pets"},
                {"id": "r2", "kind": "rule", "label": "written consent permits a pet"},
            ],
            "edges": [{"from": "r2", "relation": "overrides", "to": "r1"}],
        },
        "triples": [
            {"subject": "jonas", "predicate": "keeps", "object": "cat"},
            {"subject": "landlord", "predicate": "consent_given", "object": "none"},
        ],
        "nl_queries": ["May Jonas keep the cat in the flat?"],
    },
    "tax-06": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule",
                 "label": "income below threshold owes no advance payment"},
                {"id": "c1", "kind": "condition", "label": "taxable income below thirty thousand"},
            ],
            "edges": [{"from": "r1", "relation": "has_condition", "to": "c1"}],
        },
        "triples": [
            {"subject": "rosa", "predicate": "income", "object": "twenty_one_thousand"},
            {"subject": "twenty_one_thousand", "predicate": "below", "object": "thirty_thousand"},
        ],
        "nl_queries": ["Is an advance payment due from Rosa?"],
    },
    "perm-07": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "structures taller than three meters need a permit"},
                {"id": "r2", "kind": "rule", "label": "temporary tents under thirty days are exempt"},
            ],
            "edges": [{"from": "r2", "relation": "overrides", "to": "r1"}],
        },
        "triples": [
            {"subject": "festival_tent", "predicate": "height", "object": "five_meters"},
            {"subject": "five_meters", "predicate": "taller_than", "object": "three_meters"},
        ],
        "nl_queries": ["Will the tent remain standing for more than thirty days?"],
    },
    "emp-08": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "employees must not disclose client data"},
                {"id": "r2", "kind": "rule", "label": "legally required disclosures are permitted"},
            ],
            "edges": [{"from": "r2", "relation": "overrides", "to": "r1"}],
        },
        "triples": [
            {"subject": "priya", "predicate": "attended", "object": "conference"},
            {"subject": "priya", "predicate": "talk_topic", "object": "general_trends"},
        ],
        "nl_queries": ["Did Priya disclose client data to a third party?"],
    },
    "ship-09": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule",
                 "label": "damaged arrivals require an incident report within two days"},
            ],
            "edges": [],
        },
        "triples": [
            {"subject": "glassware_pallet", "predicate": "arrived", "object": "damaged"},
            {"subject": "orion_freight", "predicate": "is", "object": "carrier"},
        ],
        "nl_queries": ["Must the carrier file an incident report for the shattered pallet?"],
    },
    "dnd-10": {
        "ontology": {
            "nodes": [
                {"id": "r1", "kind": "rule", "label": "heavy armor blocks swim speed"},
                {"id": "r2", "kind": "rule", "label": "ring of buoyancy allows swimming"},
            ],
            "edges": [{"from": "r2", "relation": "overrides", "to": "r1"}],
        },
        "triples": [
            {"subject": "brakk", "predicate": "wears", "object": "plate_armor"},
            {"subject": "plate_armor", "predicate": "is", "object": "heavy_armor"},
            {"subject": "brakk", "predicate": "carries", "object": "no_magic_items"},
        ],
        "nl_queries": ["Can Brakk use a swim speed while wearing plate armor?"],
    },
}

# Unique substring that identifies an instance inside its synthesis prompt,
# where the hypothesis never appears. Drawn from the nl_queries above.
SYNTH_MARKER = {
    "lib-01": "qualify to borrow another book",
    "av-02": "below the altitude limit",
    "med-03": "electrocardiogram be recorded for the arriving",
    "visa-04": "shorter stay period",
    "lease-05": "keep the cat in the flat",
    "tax-06": "advance payment due from Rosa",
    "perm-07": "remain standing for more than thirty",
    "emp-08": "disclose client data to a third party",
    "ship-09": "incident report for the shattered pallet",
    "dnd-10": "swim speed while wearing plate armor",
}

SYNTH = {
    "lib-01": (
        "member(dana).\noverdue_items(dana, none).\nrequests(dana, third_book).",
        "@{borrow_rule} may_borrow(?X) :- member(?X).\n"
        "@{overdue_block} \\neg may_borrow(?X) :- member(?X), has_overdue(?X).\n"
        "\\overrides(overdue_block, borrow_rule).",
        "?- may_borrow(dana).",
    ),
    "av-02": (
        "drone(apex_drone).\naltitude(apex_drone, six_hundred).\nlimit(four_hundred).\n"
        "exceeds(six_hundred, four_hundred).",
        "above_limit(?D) :- altitude(?D, ?A), limit(?L), exceeds(?A, ?L).\n"
        "\\neg within_limit(?D) :- above_limit(?D).",
        "?- within_limit(apex_drone).",
    ),
    "med-03": (
        "patient(patient_one).\nreports(patient_one, chest_pain).",
        "requires_ecg(?P) :- patient(?P), reports(?P, chest_pain).",
        "?- requires_ecg(patient_one).",
    ),
    "visa-04": (
        "visitor(mireille).\nentered_on(mireille, march_first).",
        "@{ninety_day_rule} may_stay_ninety(?X) :- visitor(?X).",
        "?- visa_states_shorter(mireille).",
    ),
    "lease-05": (
        "keeps_pet(jonas, cat).\nconsent(landlord, none).",
        "@{no_pets} \\neg may_keep(?T, ?P) :- keeps_pet(?T, ?P).\n"
        "@{consent_rule} may_keep(?T, ?P) :- keeps_pet(?T, ?P), has_consent(?T).\n"
        "\\overrides(consent_rule, no_pets).",
        "?- may_keep(jonas, cat).",
    ),
    "tax-06": (
        "income(rosa, twenty_one_thousand).\nthreshold(thirty_thousand).\n"
        "below(twenty_one_thousand, thirty_thousand).",
        "below_threshold(?P) :- income(?P, ?I), threshold(?T), below(?I, ?T).\n"
        "\\neg advance_due(?P) :- below_threshold(?P).",
        "?- advance_due(rosa).",
    ),
    "perm-07": (
        "structure(festival_tent).\nheight(festival_tent, five_meters).\n"
        "taller_than_three(five_meters).",
        "@{permit_rule} permit_required(?S) :- structure(?S), height(?S, ?H), "
        "taller_than_three(?H).\n"
        "@{tent_exception} \\neg permit_required(?S) :- temporary_tent(?S), "
        "under_thirty_days(?S).\n"
        "\\overrides(tent_exception, permit_rule).",
        "?- permit_required(?S, ?D).\n?- \\naf under_thirty_days(?X).",
    ),
    "emp-08": (
        "employee(priya).\nattended(priya, conference).\ntalk_topic(priya, general_trends).",
        "@{no_disclosure} \\neg may_disclose(?E, client_data) :- employee(?E).",
        "?- disclosed(priya, client_data).",
    ),
    "ship-09": (
        "arrived_damaged(glassware_pallet).\ncarrier(orion_freight).",
        "must_file_report(?C) :- carrier(?C), arrived_damaged(?G).",
        "?- must_file_report(orion_freight).",
    ),
    "dnd-10": (
        "wears(brakk, plate_armor).\nheavy_armor(plate_armor).\ndives_into(brakk, moat).",
        "@{armor_block} \\neg can_swim(?C) :- wears(?C, ?A), heavy_armor(?A).\n"
        "@{ring_rule} can_swim(?C) :- wears_ring(?C, buoyancy).\n"
        "\\overrides(ring_rule, armor_block).",
        "?- can_swim(brakk).",
    ),
}

# (numbered trace lines, predicted label); visa-04 and ship-09 are deliberate
# wrong answers so the fixture run has off-diagonal confusion cells.
GROUNDED = {
    "lib-01": (
        [
            "Dana is a member.",
            "Dana has overdue items: none.",
            "Check the blocking condition: no overdue items are outstanding for Dana.",
            "apply rule: members may borrow books. The program answers yes for may_borrow(dana).",
            "The overdue blocking rule does not fire, so there is no conflict to resolve.",
            "The hypothesis follows from the borrowing rule and the recorded facts.",
        ],
        "entailment",
    ),
    "av-02": (
        [
            "The Apex drone altitude is six hundred feet.",
            "Six hundred exceeds the four hundred foot limit.",
            "apply rule: drones must not fly above four hundred feet.",
            "The program answers no for within_limit(apex_drone), so the claim of staying "
            "within the permitted altitude conflicts with the derived violation.",
            "The hypothesis is contradicted.",
        ],
        "contradiction",
    ),
    "med-03": (
        [
            "Patient one reports chest pain.",
            "apply rule: chest pain requires an electrocardiogram within ten minutes.",
            "The program answers yes for requires_ecg(patient_one).",
            "The hypothesis is entailed.",
        ],
        "entailment",
    ),
    "visa-04": (
        [
            "Mireille is a visitor who entered on the first of March.",
            "The program answers no for visa_states_shorter(mireille).",
            "A no answer means the visa does not state a shorter period, so the "
            "hypothesis is contradicted.",
        ],
        "contradiction",
    ),
    "lease-05": (
        [
            "Jonas keeps a cat and the landlord has given no consent.",
            "apply rule: tenants shall not keep pets.",
            "The consent rule would override it, but has_consent(jonas) is not derivable.",
            "The program answers no for may_keep(jonas, cat).",
            "Jonas is not permitted to keep the cat, which is what the hypothesis states.",
        ],
        "entailment",
    ),
    "tax-06": (
        [
            "Rosa's income is twenty-one thousand, below the thirty thousand threshold.",
            "apply rule: income below threshold owes no advance payment.",
            "The program answers no for advance_due(rosa).",
            "The hypothesis that Rosa owes an advance payment is contradicted.",
        ],
        "contradiction",
    ),
    "perm-07": (
        [
            "No query compiled, so I rely on the symbolic context alone.",
            "The tent is five meters tall, so a permit may be required, but nothing in "
            "the context states how long the tent will remain standing.",
            "The hypothesis concerns duration, which is not determined either way.",
        ],
        "neutral",
    ),
    "emp-08": (
        [
            "Priya attended the conference and spoke about general market trends.",
            "The program answers no for disclosed(priya, client_data).",
            "A no answer only means no disclosure is recorded; the context does not "
            "establish what Priya said beyond the talk topic.",
            "Neither the hypothesis nor its negation is derivable.",
        ],
        "neutral",
    ),
    "ship-09": (
        [
            "The glassware pallet arrived damaged and Orion Freight is the carrier.",
            "The program answers yes for must_file_report(orion_freight).",
            "The two day deadline may already have passed, so I cannot confirm the duty "
            "still stands.",
        ],
        "neutral",
    ),
    "dnd-10": (
        [
            "Brakk wears plate armor, which is heavy armor.",
            "apply rule: heavy armor blocks swim speed.",
            "The ring rule would override it, but Brakk carries no magic items.",
            "The program answers no for can_swim(brakk).",
            "The hypothesis is contradicted.",
        ],
        "contradiction",
    ),
}

ORGANIZE = {
    "lib-01": [
        ("fact_lookup", "Dana is a member."),
        ("fact_lookup", "Dana has overdue items: none."),
        ("check_condition", "No overdue items are outstanding for Dana."),
        ("apply_rule", "apply rule: members may borrow books"),
        ("resolve_conflict_override", "The overdue blocking rule does not fire, no conflict."),
        ("conclude_label", "Entailment: Dana may borrow the book."),
    ],
    "av-02": [
        ("fact_lookup", "apex_drone altitude six_hundred_feet"),
        ("fact_lookup", "six_hundred_feet exceeds four_hundred_feet"),
        ("apply_rule", "drones must not fly above four hundred feet"),
        ("contradiction_detected", "The altitude claim conflicts with the derived violation."),
        ("conclude_label", "Contradiction."),
    ],
    "med-03": [
        ("fact_lookup", "patient_one reports chest_pain"),
        ("apply_rule", "chest pain requires an electrocardiogram within ten minutes"),
        ("conclude_label", "Entailment."),
    ],
    "visa-04": [
        ("fact_lookup", "mireille is visitor"),
        ("check_condition", "The shorter-period query returned no."),
        ("conclude_label", "Contradiction."),
    ],
    "lease-05": [
        ("fact_lookup", "jonas keeps cat"),
        ("apply_rule", "tenants shall not keep pets"),
        ("check_condition", "has_consent(jonas) is not derivable."),
        ("conclude_label", "Entailment: Jonas is not permitted to keep the cat."),
    ],
    "tax-06": [
        ("fact_lookup", "rosa income twenty_one_thousand"),
        ("check_condition", "Twenty-one thousand is below the threshold."),
        ("apply_rule", "income below threshold owes no advance payment"),
        ("conclude_label", "Contradiction."),
    ],
    "perm-07": [
        ("check_condition", "No query compiled; relying on the symbolic context."),
        ("check_condition", "Nothing states how long the tent stays up."),
        ("conclude_label", "Neutral."),
    ],
    "emp-08": [
        ("fact_lookup", "priya talk_topic general_trends"),
        ("check_condition", "No disclosure is recorded either way."),
        ("conclude_label", "Neutral."),
    ],
    "ship-09": [
        ("fact_lookup", "glassware_pallet arrived damaged"),
        ("check_condition", "The deadline may have passed."),
        ("conclude_label", "Neutral."),
    ],
    "dnd-10": [
        ("fact_lookup", "brakk wears plate_armor"),
        ("apply_rule", "heavy armor blocks swim speed"),
        ("resolve_conflict_override", "The ring rule does not apply, the armor rule stands."),
        ("conclude_label", "Contradiction."),
    ],
}

BASIC_ND = {"lib-01": "entailment", "av-02": "contradiction", "med-03": "neutral"}


def selection_reply(iid):
    return "Relevant passages:\n\n" + fence("text", INSTANCES[iid]["guidelines"]) + "\n"


def symctx_reply(iid):
    return "Extraction:\n\n" + jfence(SYMCTX[iid]) + "\n"


def synthesis_reply(iid):
    facts, rules, queries = SYNTH[iid]
    return (
        "Program:\n\n"
        + fence("facts", facts) + "\n\n"
        + fence("rules", rules) + "\n\n"
        + fence("queries", queries) + "\n"
    )


def grounded_reply(iid):
    lines, label = GROUNDED[iid]
    hyp = INSTANCES[iid]["hypothesis"]
    body = f'Hypothesis under test: "{hyp}"\n\n'
    for i, text in enumerate(lines, 1):
        body += f"{i}. {text}\n"
    return body + "\n" + jfence({"label": label}) + "\n"


def organize_reply(iid):
    steps = [{"type": t, "text": x} for t, x in ORGANIZE[iid]]
    return "Typed steps:\n\n" + jfence({"steps": steps}) + "\n"


def basic_nd_reply(iid):
    return "Judgement from general knowledge alone:\n\n" + jfence({"label": BASIC_ND[iid]}) + "\n"


STAGES = [
    ("preparing an entailment problem for symbolic analysis", "selection", selection_reply),
    ("Extract three things", "symbolic_context", symctx_reply),
    ("Translate the symbolic context below", "synthesis", synthesis_reply),
    ("You are a grounded reasoner", "grounded", grounded_reply),
    ("Sort the raw reasoning trace below", "organize", organize_reply),
    ("using your own knowledge", "basic_nd", basic_nd_reply),
]


def classify(prompt):
    for phrase, stage, maker in STAGES:
        if phrase in prompt:
            break
    else:
        raise RuntimeError("unclassifiable prompt:\n" + prompt[:400])
    if "failed validation" in prompt or "no facts, rules, or queries" in prompt:
        raise RuntimeError("a repair prompt appeared; some canned reply is malformed")
    if stage == "synthesis":
        for iid, marker in SYNTH_MARKER.items():
            if marker in prompt:
                return stage, iid, maker
        raise RuntimeError("synthesis prompt matches no instance:\n" + prompt[:400])
    for iid, row in INSTANCES.items():
        if row["hypothesis"] in prompt:
            return stage, iid, maker
    raise RuntimeError(f"{stage} prompt matches no instance:\n" + prompt[:400])


def run_cli(tmp, tag, args):
    out = tmp / f"out_{tag}"
    cache = tmp / f"cache_{tag}"
    cmd = [str(BIN)] + args + ["--mock", "--mock-dir", str(MOCK),
                               "--out", str(out), "--cache", str(cache)]
    return subprocess.run(cmd, capture_output=True, text=True)


def main():
    MOCK.mkdir(parents=True, exist_ok=True)
    manifest_path = MOCK / "manifest.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}

    for iteration in range(1, 9):
        misses_dir = MOCK / "misses"
        shutil.rmtree(misses_dir, ignore_errors=True)
        with tempfile.TemporaryDirectory() as td:
            tmp = Path(td)
            r1 = run_cli(tmp, "reason", ["reason", "--dataset", str(FIXTURES)])
            r2 = run_cli(tmp, "eval", ["evaluate", "--method", "basic_nd",
                                       "--dataset", str(MINI)])
        misses = sorted(misses_dir.glob("*.prompt.txt")) if misses_dir.exists() else []
        if not misses:
            if r1.returncode != 0 or r2.returncode != 0:
                print(r1.stderr, r2.stderr, sep="\n")
                sys.exit("clean manifest but nonzero exit codes")
            print(f"iteration {iteration}: no misses; recording complete "
                  f"({len(manifest)} entries)")
            return
        print(f"iteration {iteration}: {len(misses)} misses")
        for miss in misses:
            digest = miss.name.split(".")[0]
            stage, iid, maker = classify(miss.read_text())
            fname = f"{stage}_{iid}.txt"
            (MOCK / fname).write_text(maker(iid))
            manifest[digest] = fname
            print(f"  {digest[:12]}  ->  {fname}")
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        shutil.rmtree(misses_dir, ignore_errors=True)
    sys.exit("recording did not converge in 8 iterations")


if __name__ == "__main__":
    main()
