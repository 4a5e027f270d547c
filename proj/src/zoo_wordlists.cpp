#include "dgakit/zoo.hpp"

// Word tables for the wordlist family. Kept in sync with
// data/wordlists/list{0,1,2}.txt; a test compares the two.

namespace dgakit {

namespace {

using Words = std::array<std::string_view, kWordsPerList>;

constexpr Words kList0 = {
    "time",    "year",   "people", "way",      "day",     "man",    "thing",  "woman",
    "life",    "child",  "world",  "school",   "state",   "family", "student", "group",
    "country", "problem", "hand",  "part",     "place",   "case",   "week",   "company",
    "system",  "program", "question", "work",  "number",  "night",  "point",  "home",
    "water",   "room",   "mother", "area",     "money",   "story",  "fact",   "month",
    "right",   "study",  "book",   "eye",      "job",     "word",   "business", "issue",
    "side",    "kind",   "head",   "house",    "service", "friend", "father", "power",
    "hour",    "game",   "line",   "end",      "member",  "law",    "car",    "city",
    "name",    "team",   "minute", "idea",     "kid",     "body",   "back",   "parent",
    "face",    "level",  "office", "door",     "health",  "person", "art",    "war",
    "history", "party",  "result", "change",   "morning", "reason", "girl",   "guy",
    "moment",  "air",    "force",  "nature",   "fire",    "image",  "unit",   "wall",
    "season",  "stage",  "truth",  "town",     "root",    "sound",  "sign",   "period",
    "model",   "plan",   "shop",   "floor",    "couple",  "step",   "field",  "event",
    "light",   "future", "deal",   "user",     "goal",    "bank",   "test",   "peace",
    "sport",   "board",  "oil",    "blood",    "press",   "quote",  "lab",    "star",
};

constexpr Words kList1 = {
    "take",   "make",    "know",   "see",    "come",   "think",  "look",   "want",
    "give",   "use",     "find",   "tell",   "ask",    "seem",   "feel",   "try",
    "leave",  "call",    "good",   "new",    "first",  "last",   "long",   "great",
    "little", "own",     "other",  "old",    "big",    "high",   "small",  "large",
    "next",   "early",   "young",  "few",    "public", "bad",    "same",   "able",
    "keep",   "let",     "begin",  "help",   "talk",   "turn",   "start",  "show",
    "hear",   "play",    "run",    "move",   "like",   "live",   "believe", "hold",
    "bring",  "happen",  "write",  "provide", "sit",   "lose",   "pay",    "meet",
    "include", "set",    "learn",  "lead",   "stay",   "fall",   "reach",  "kill",
    "remain", "grow",    "open",   "walk",   "win",    "offer",  "buy",    "wait",
    "serve",  "die",     "send",   "expect", "build",  "carry",  "cut",    "read",
    "spend",  "drive",   "stand",  "fight",  "throw",  "fill",   "raise",  "pass",
    "speak",  "sell",    "wear",   "pull",   "clear",  "kick",   "count",  "accept",
    "avoid",  "check",   "choose", "claim",  "close",  "cover",  "create", "dance",
    "decide", "deliver", "deny",   "depend", "design", "draw",   "dream",  "drink",
    "drop",   "earn",    "eat",    "enjoy",  "enter",  "exist",  "fail",   "fit",
};

constexpr Words kList2 = {
    "river",  "ocean",   "stone",   "cloud",   "storm",  "beach",  "valley",  "desert",
    "forest", "island",  "meadow",  "cliff",   "creek",  "marsh",  "grove",   "pond",
    "maple",  "cedar",   "birch",   "willow",  "aspen",  "spruce", "poplar",  "walnut",
    "acorn",  "fern",    "moss",    "ivy",     "reed",   "vine",   "thorn",   "petal",
    "falcon", "raven",   "sparrow", "eagle",   "heron",  "crane",  "finch",   "robin",
    "swan",   "crow",    "owl",     "hawk",    "dove",   "wren",   "lark",    "gull",
    "copper", "iron",    "silver",  "zinc",    "nickel", "cobalt", "carbon",  "helium",
    "neon",   "argon",   "xenon",   "radon",   "sodium", "lithium", "oxygen", "sulfur",
    "galaxy", "planet",  "comet",   "meteor",  "nebula", "orbit",  "lunar",   "solar",
    "cosmic", "astral",  "zenith",  "nadir",   "aurora", "eclipse", "quasar", "pulsar",
    "cipher", "token",   "packet",  "router",  "server", "client", "switch",  "buffer",
    "socket", "kernel",  "thread",  "stack",   "queue",  "array",  "vector",  "matrix",
    "violet", "indigo",  "crimson", "scarlet", "amber",  "coral",  "teal",    "olive",
    "maroon", "navy",    "beige",   "khaki",   "plum",   "rust",   "jade",    "onyx",
    "tango",  "salsa",   "waltz",   "polka",   "rumba",  "samba",  "mango",   "papaya",
    "guava",  "lychee",  "melon",   "berry",   "grape",  "lemon",  "peach",   "apricot",
};

}  // namespace

const std::array<std::array<std::string_view, kWordsPerList>, kWordListCount>& word_lists() {
    static const std::array<Words, kWordListCount> lists = {kList0, kList1, kList2};
    return lists;
}

}  // namespace dgakit
