"""Embedded word-level corpus backing the deterministic toy oracle.

A small clause language over a vocabulary of roughly 500 types. Every
clause is trained in two forms, the full clause and the same clause with
its subject dropped, so the oracle learns two facts per clause: which word
follows the subject slot, and which word opens the subject-less form.
Deleting the verb from a full clause therefore lands its first word in a
context the oracle knows with a different continuation (large divergence),
deleting the subject lands the verb in a context the oracle knows with the
same continuation (near-zero divergence), and other single deletions fall
into unseen contexts (moderate divergence).

Cross-clause context collisions would blur those contrasts, and any word
reused across clauses deepens the counts of the contexts it keys, which
inflates the divergence of edits near it. So the slot that keys each
trained context belongs to exactly one clause:

- verbs are unique among transitive clauses (they key the post-subject
  contexts),
- objects are unique across all transitive families (they key the
  object-adjacent and sentence-final contexts),
- adjectives, prepositions, and intransitive adverbs are unique within the
  families that use them,
- subject nouns are split between transitive and intransitive clauses so
  subject+adverb pairs cannot recur across the two shapes,
- intransitive verbs are split between the preposition family and the plain
  family so verb+boundary contexts cannot recur across the two shapes.

Subjects, intransitive verbs, places, and transitive adverbs may repeat;
no trained context is keyed by those slots alone.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..core import Sentence
from ..vocab import SPECIAL_DEFAULTS, Vocabulary

_SEED_CLAUSES = 905117

ANIMATE_NOUNS = (
    "cat", "dog", "fox", "bird", "horse", "rabbit", "monkey", "tiger", "lion", "bear",
    "squirrel", "donkey", "goat", "duck", "owl", "crow", "farmer", "teacher", "doctor", "singer",
    "soldier", "painter", "baker", "sailor", "pilot", "nurse", "judge", "poet", "hunter", "dancer",
    "girl", "boy", "king", "queen", "knight", "clerk", "chef", "guard", "piper", "weaver",
    "rider", "robber", "shepherd", "gardener", "builder", "miner", "tailor", "scout", "monk", "pupil",
    "actor", "juggler", "drummer", "fiddler", "keeper", "ranger", "smith", "scholar", "herald", "jester",
)

PLACE_NOUNS = (
    "park", "river", "garden", "market", "forest", "school", "bridge", "field", "harbor", "kitchen",
    "library", "station", "valley", "meadow", "castle", "village", "tower", "barn", "orchard", "shore",
    "hill", "cave", "yard", "square", "alley", "chapel", "cellar", "attic", "courtyard", "stable",
    "mill", "quarry", "dock", "plaza", "lane", "grove", "marsh", "ridge", "tunnel", "camp",
    "inn", "fort", "pier", "trail", "pasture",
)

OBJECT_NOUNS = (
    "ball", "stick", "book", "apple", "stone", "basket", "letter", "song", "wall", "fence",
    "cart", "bell", "coat", "lamp", "rope", "drum", "kite", "map", "coin", "shoe",
    "ladder", "bucket", "box", "flag", "wheel", "chair", "table", "mirror", "candle", "brush",
    "hammer", "nail", "plank", "sack", "jar", "kettle", "plate", "spoon", "blanket", "pillow",
    "banner", "carpet", "curtain", "barrel", "crate", "anchor", "paddle", "saddle", "lantern", "whistle",
    "ribbon", "button", "parcel", "satchel", "trunk",
)

TRANSITIVE_VERBS = (
    "chases", "catches", "watches", "carries", "finds", "follows", "paints", "builds", "repairs", "polishes",
    "lifts", "pushes", "pulls", "drops", "throws", "kicks", "cleans", "opens", "closes", "fixes",
    "grabs", "guards", "shakes", "drags", "mends", "fills", "empties", "wraps", "splits", "stacks",
    "hauls", "fetches", "trades", "counts", "measures", "sharpens", "ties", "unties", "loads", "unloads",
    "borrows", "returns", "delivers", "inspects", "admires", "buries", "paddles", "rattles", "scrubs", "stirs",
    "tips", "tows", "waxes", "weighs", "winds", "stows", "trims", "dusts", "peels", "stamps",
)

INTRANSITIVE_VERBS = (
    "sleeps", "runs", "jumps", "sings", "waits", "falls", "laughs", "swims", "dances", "walks",
    "rests", "naps", "nods", "smiles", "shouts", "stumbles", "wanders", "dreams", "whistles", "crawls",
    "marches", "spins", "yawns", "kneels", "paces", "hums", "stretches", "shivers", "grumbles", "dozes",
    "lingers", "hurries", "tiptoes", "strolls", "gallops", "trots", "drifts", "wobbles", "fidgets", "snores",
)

ADJECTIVES = (
    "big", "small", "old", "young", "red", "blue", "green", "happy", "sad", "quick",
    "slow", "tall", "short", "loud", "quiet", "bright", "dark", "clever", "lazy", "gentle",
    "fierce", "tiny", "huge", "warm", "cold", "clean", "dirty", "round", "narrow", "wide",
    "heavy", "light", "smooth", "rough", "shiny", "dusty", "plain", "fancy", "sturdy", "crooked",
    "silent", "noisy", "brave", "timid", "proud", "humble", "eager", "weary", "cheerful", "gloomy",
)

ADVERBS = (
    "quickly", "slowly", "quietly", "loudly", "happily", "sadly", "gently", "fiercely", "calmly", "eagerly",
    "bravely", "shyly", "proudly", "wearily", "neatly", "roughly", "softly", "boldly", "keenly", "idly",
    "swiftly", "lazily", "warmly", "coldly", "gladly", "firmly", "lightly", "briskly", "smoothly", "steadily",
    "carefully", "carelessly", "patiently", "politely", "rudely", "abruptly", "blandly", "crisply", "dimly", "dully",
    "faintly", "grandly", "hoarsely", "meekly", "mildly", "primly", "sourly", "stiffly", "tamely", "tartly",
)

PREPOSITIONS = (
    "in", "near", "behind", "beside", "under", "above", "across", "along",
    "through", "around", "toward", "against", "beyond", "beneath", "within", "past",
)

MISC_WORDS = (
    "the", "a", "and", "with", "to", "on", "at", "it", "he", "she",
    "they", "is", "was", "not", "that", "this",
)

PUNCTUATION = (".", ",")


def _plural(noun: str) -> str:
    if noun.endswith(("s", "x", "z", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and noun[-2] not in "aeiou":
        return noun[:-1] + "ies"
    return noun + "s"


def all_surface_forms() -> tuple[str, ...]:
    countable = ANIMATE_NOUNS + OBJECT_NOUNS
    forms: list[str] = []
    seen = set()
    for group in (
        ANIMATE_NOUNS,
        PLACE_NOUNS,
        OBJECT_NOUNS,
        tuple(_plural(n) for n in countable),
        TRANSITIVE_VERBS,
        INTRANSITIVE_VERBS,
        ADJECTIVES,
        ADVERBS,
        PREPOSITIONS,
        MISC_WORDS,
        PUNCTUATION,
    ):
        for word in group:
            if word not in seen:
                seen.add(word)
                forms.append(word)
    return tuple(forms)


@lru_cache(maxsize=1)
def embedded_vocabulary() -> Vocabulary:
    specials = [SPECIAL_DEFAULTS[k] for k in ("pad", "unk", "cls", "sep", "mask")]
    return Vocabulary.from_tokens(tuple(specials) + tuple(sorted(all_surface_forms())))


def _draw(rng: np.random.Generator, pool: tuple[str, ...], size: int) -> list[str]:
    return [pool[int(k)] for k in rng.choice(len(pool), size=size, replace=False)]


def _pick(rng: np.random.Generator, pool: tuple[str, ...]) -> str:
    return pool[int(rng.integers(len(pool)))]


@lru_cache(maxsize=1)
def clause_inventory() -> tuple[dict, ...]:
    """Deterministic clauses grouped in five surface families.

    verb_obj:   subject verb object adverb
    verb_adj:   subject verb adjective object adverb
    verb_place: subject verb object preposition place
    verb_prep:  subject verb preposition place
    plain:      subject verb adverb
    """
    rng = np.random.default_rng(_SEED_CLAUSES)
    trans_subjects = ANIMATE_NOUNS[30:]
    intrans_subjects = ANIMATE_NOUNS[:30]

    verbs = _draw(rng, TRANSITIVE_VERBS, 48)
    objects = _draw(rng, OBJECT_NOUNS, 48)
    adjectives = _draw(rng, ADJECTIVES, 20)
    intrans_adverbs = _draw(rng, ADVERBS[:34], 34)
    trans_adverbs = ADVERBS[34:]
    prepositions = _draw(rng, PREPOSITIONS, 16)

    clauses: list[dict] = []
    for i in range(20):
        clauses.append(
            {
                "family": "verb_obj",
                "subj": _pick(rng, trans_subjects),
                "verb": verbs[i],
                "obj": objects[i],
                "adv": _pick(rng, trans_adverbs),
            }
        )
    for i in range(20):
        clauses.append(
            {
                "family": "verb_adj",
                "subj": _pick(rng, trans_subjects),
                "verb": verbs[20 + i],
                "adj": adjectives[i],
                "obj": objects[20 + i],
                "adv": _pick(rng, trans_adverbs),
            }
        )
    for i in range(8):
        clauses.append(
            {
                "family": "verb_place",
                "subj": _pick(rng, trans_subjects),
                "verb": verbs[40 + i],
                "obj": objects[40 + i],
                "prep": prepositions[8 + i],
                "place": _pick(rng, PLACE_NOUNS),
            }
        )
    for i in range(8):
        clauses.append(
            {
                "family": "verb_prep",
                "subj": _pick(rng, intrans_subjects),
                "verb": _pick(rng, INTRANSITIVE_VERBS[:10]),
                "prep": prepositions[i],
                "place": _pick(rng, PLACE_NOUNS),
            }
        )
    for i in range(34):
        clauses.append(
            {
                "family": "plain",
                "subj": _pick(rng, intrans_subjects),
                "verb": _pick(rng, INTRANSITIVE_VERBS[10:]),
                "adv": intrans_adverbs[i],
            }
        )
    return tuple(clauses)


def clause_full_form(clause: dict) -> tuple[str, ...]:
    family = clause["family"]
    if family == "verb_obj":
        return (clause["subj"], clause["verb"], clause["obj"], clause["adv"])
    if family == "verb_adj":
        return (clause["subj"], clause["verb"], clause["adj"], clause["obj"], clause["adv"])
    if family == "verb_place":
        return (clause["subj"], clause["verb"], clause["obj"], clause["prep"], clause["place"])
    if family == "verb_prep":
        return (clause["subj"], clause["verb"], clause["prep"], clause["place"])
    return (clause["subj"], clause["verb"], clause["adv"])


def clause_variants(clause: dict) -> tuple[tuple[str, ...], ...]:
    """The two trained forms of one clause: full, and subject dropped."""
    full = clause_full_form(clause)
    return (full, full[1:])


@lru_cache(maxsize=1)
def embedded_corpus() -> tuple[tuple[str, ...], ...]:
    """The training sentences the toy oracle counts over."""
    sentences: list[tuple[str, ...]] = []
    for clause in clause_inventory():
        sentences.extend(clause_variants(clause))
    return tuple(sentences)


def demo_sentences(count: int = 200, seed: int = 4242) -> list[Sentence]:
    """In-domain sentences for demos and determinism stress runs."""
    rng = np.random.default_rng(seed)
    inventory = clause_inventory()
    out = []
    while len(out) < count:
        clause = inventory[int(rng.integers(len(inventory)))]
        variants = clause_variants(clause)
        out.append(Sentence(variants[int(rng.integers(len(variants)))]))
    return out


def predicate_demo_corpus(count: int = 40, seed: int = 7) -> list[tuple[Sentence, tuple[bool, ...]]]:
    """Full-form clause sentences with the verb flagged.

    Word pools are disjoint across slots, so each sentence carries exactly
    one verb.
    """
    rng = np.random.default_rng(seed)
    inventory = clause_inventory()
    out = []
    while len(out) < count:
        clause = inventory[int(rng.integers(len(inventory)))]
        words = clause_full_form(clause)
        flags = tuple(w == clause["verb"] for w in words)
        out.append((Sentence(words), flags))
    return out
