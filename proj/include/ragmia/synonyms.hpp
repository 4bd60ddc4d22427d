#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace ragmia {

// Fixed 200-pair replacement table used by the multi-sample augmenter and
// the neighborhood perturber. Shipped with the library so augmentation is
// identical across runs and machines.
inline const std::unordered_map<std::string, std::string>& synonym_table() {
    static const std::unordered_map<std::string, std::string> table = {
        {"big", "large"}, {"large", "big"}, {"small", "little"}, {"little", "small"},
        {"fast", "quick"}, {"quick", "fast"}, {"slow", "sluggish"}, {"sluggish", "slow"},
        {"happy", "glad"}, {"glad", "happy"}, {"sad", "unhappy"}, {"unhappy", "sad"},
        {"good", "fine"}, {"fine", "good"}, {"bad", "poor"}, {"poor", "bad"},
        {"begin", "start"}, {"start", "begin"}, {"end", "finish"}, {"finish", "end"},
        {"help", "assist"}, {"assist", "help"}, {"ask", "inquire"}, {"inquire", "ask"},
        {"answer", "reply"}, {"reply", "answer"}, {"question", "query"}, {"query", "question"},
        {"doctor", "physician"}, {"physician", "doctor"}, {"illness", "sickness"},
        {"sickness", "illness"}, {"medicine", "medication"}, {"medication", "medicine"},
        {"pain", "ache"}, {"ache", "pain"}, {"cure", "remedy"}, {"remedy", "cure"},
        {"disease", "disorder"}, {"disorder", "disease"}, {"symptom", "sign"},
        {"sign", "symptom"}, {"patient", "sufferer"}, {"sufferer", "patient"},
        {"treatment", "therapy"}, {"therapy", "treatment"}, {"severe", "serious"},
        {"serious", "severe"}, {"mild", "slight"}, {"slight", "mild"},
        {"often", "frequently"}, {"frequently", "often"}, {"rarely", "seldom"},
        {"seldom", "rarely"}, {"always", "constantly"}, {"constantly", "always"},
        {"maybe", "perhaps"}, {"perhaps", "maybe"}, {"show", "display"},
        {"display", "show"}, {"tell", "inform"}, {"inform", "tell"},
        {"find", "locate"}, {"locate", "find"}, {"look", "glance"}, {"glance", "look"},
        {"see", "observe"}, {"observe", "see"}, {"hear", "listen"}, {"listen", "hear"},
        {"talk", "speak"}, {"speak", "talk"}, {"walk", "stroll"}, {"stroll", "walk"},
        {"run", "sprint"}, {"sprint", "run"}, {"eat", "consume"}, {"consume", "eat"},
        {"drink", "sip"}, {"sip", "drink"}, {"sleep", "rest"}, {"rest", "sleep"},
        {"work", "labor"}, {"labor", "work"}, {"make", "create"}, {"create", "make"},
        {"build", "construct"}, {"construct", "build"}, {"break", "shatter"},
        {"shatter", "break"}, {"fix", "repair"}, {"repair", "fix"},
        {"buy", "purchase"}, {"purchase", "buy"}, {"sell", "vend"}, {"vend", "sell"},
        {"give", "provide"}, {"provide", "give"}, {"take", "grab"}, {"grab", "take"},
        {"keep", "retain"}, {"retain", "keep"}, {"lose", "misplace"},
        {"misplace", "lose"}, {"win", "prevail"}, {"prevail", "win"},
        {"new", "novel"}, {"novel", "new"}, {"old", "aged"}, {"aged", "old"},
        {"young", "youthful"}, {"youthful", "young"}, {"hot", "warm"}, {"warm", "hot"},
        {"cold", "chilly"}, {"chilly", "cold"}, {"wet", "damp"}, {"damp", "wet"},
        {"dry", "arid"}, {"arid", "dry"}, {"hard", "tough"}, {"tough", "hard"},
        {"soft", "gentle"}, {"gentle", "soft"}, {"loud", "noisy"}, {"noisy", "loud"},
        {"quiet", "silent"}, {"silent", "quiet"}, {"bright", "vivid"},
        {"vivid", "bright"}, {"dark", "dim"}, {"dim", "dark"},
        {"clean", "tidy"}, {"tidy", "clean"}, {"dirty", "filthy"}, {"filthy", "dirty"},
        {"rich", "wealthy"}, {"wealthy", "rich"}, {"strong", "sturdy"},
        {"sturdy", "strong"}, {"weak", "feeble"}, {"feeble", "weak"},
        {"true", "correct"}, {"correct", "true"}, {"false", "wrong"},
        {"wrong", "false"}, {"easy", "simple"}, {"simple", "easy"},
        {"difficult", "tricky"}, {"tricky", "difficult"}, {"important", "crucial"},
        {"crucial", "important"}, {"common", "usual"}, {"usual", "common"},
        {"strange", "odd"}, {"odd", "strange"}, {"near", "close"}, {"close", "near"},
        {"far", "distant"}, {"distant", "far"}, {"many", "numerous"},
        {"numerous", "many"}, {"few", "scarce"}, {"scarce", "few"},
        {"whole", "entire"}, {"entire", "whole"}, {"part", "portion"},
        {"portion", "part"}, {"place", "location"}, {"location", "place"},
        {"time", "moment"}, {"moment", "time"}, {"way", "manner"}, {"manner", "way"},
        {"idea", "notion"}, {"notion", "idea"}, {"problem", "issue"},
        {"issue", "problem"}, {"result", "outcome"}, {"outcome", "result"},
        {"reason", "cause"}, {"cause", "reason"}, {"choice", "option"},
        {"option", "choice"}, {"change", "alter"}, {"alter", "change"},
        {"stop", "halt"}, {"halt", "stop"}, {"continue", "proceed"},
        {"proceed", "continue"}, {"allow", "permit"}, {"permit", "allow"},
        {"need", "require"}, {"require", "need"}, {"want", "desire"},
        {"desire", "want"}, {"think", "believe"}, {"believe", "think"},
        {"know", "understand"}, {"understand", "know"}, {"feel", "sense"},
        {"sense", "feel"}, {"try", "attempt"}, {"attempt", "try"},
    };
    return table;
}

inline std::optional<std::string> synonym_for(std::string_view token) {
    const auto& table = synonym_table();
    auto it = table.find(std::string(token));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

}  // namespace ragmia
