#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "retell/backends/interfaces.hpp"
#include "retell/core/text.hpp"
#include "retell/text/pronouns.hpp"
#include "retell/text/segment.hpp"
#include "retell/text/stopwords.hpp"

namespace retell::backends {

// Lexicon-driven resolver for short narrative text. Definite re-mentions
// ("the man") join the cluster of the first mention with the same head.
// Pronouns are linked in reading order: the current sentence is searched
// first, then earlier sentences nearest first, each left to right so the
// subject outranks objects; objects of prepositions are tried last within a
// sentence. Object pronouns never take the subject of their own sentence
// ("the farmer offered him" is not the farmer). A linked pronoun becomes a
// candidate for later pronouns. Stand-in for a trained model.
class HeuristicCorefResolver : public CorefResolver {
 public:
  std::vector<CorefCluster> resolve(const std::string& input) override {
    const auto tokens = text::tokenize(input);
    const auto sentence_starts = sentence_offsets(input);
    auto sentence_of = [&](std::size_t offset) {
      auto it = std::upper_bound(sentence_starts.begin(), sentence_starts.end(), offset);
      return static_cast<int>(it - sentence_starts.begin()) - 1;
    };

    const auto mentions = find_mentions(input, tokens);
    std::vector<int> cluster_of(mentions.size(), -1);
    std::vector<CorefCluster> clusters;
    std::vector<bool> has_pronoun;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      const auto& m = mentions[i];
      if (m.definite) {
        for (std::size_t j = 0; j < i; ++j) {
          if (mentions[j].head == m.head && !m.head.empty()) {
            cluster_of[i] = cluster_of[j];
            clusters[cluster_of[i]].mentions.push_back(m.span);
            break;
          }
        }
      }
      if (cluster_of[i] < 0) {
        cluster_of[i] = static_cast<int>(clusters.size());
        clusters.push_back({m.span, {m.span}});
        has_pronoun.push_back(false);
      }
    }

    struct Candidate {
      std::size_t begin;
      int sentence;
      Kind gender;
      bool prepositional;
      int cluster;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      candidates.push_back({mentions[i].span.begin, sentence_of(mentions[i].span.begin), mentions[i].gender,
                            mentions[i].prepositional, cluster_of[i]});
    }

    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto& tok = tokens[t];
      auto info = text::third_person_pronoun(tok.lower);
      if (!info) continue;
      const int here = sentence_of(tok.begin);
      const bool object = is_object(*info, tokens, t, input);

      // subject: first candidate of the sentence outside a prepositional phrase
      std::optional<std::size_t> subject;
      for (const auto& c : candidates) {
        if (c.sentence == here && !c.prepositional) {
          subject = c.begin;
          break;
        }
      }

      std::optional<Candidate> found;
      auto search = [&](int sentence) {
        for (bool prepositional : {false, true}) {
          for (const auto& c : candidates) {
            if (c.sentence != sentence || c.begin >= tok.begin || c.prepositional != prepositional) continue;
            if (!compatible(c.gender, info->gender)) continue;
            if (object && sentence == here && subject == c.begin) continue;
            found = c;
            return;
          }
        }
      };
      for (int s = here; s >= 0 && !found; --s) search(s);
      if (!found) continue;

      clusters[found->cluster].mentions.push_back({tok.begin, tok.end});
      has_pronoun[found->cluster] = true;
      Candidate linked{tok.begin, here, found->gender, t > 0 && is_preposition(tokens[t - 1].lower),
                       found->cluster};
      candidates.insert(std::upper_bound(candidates.begin(), candidates.end(), linked,
                                         [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; }),
                        linked);
    }

    std::vector<CorefCluster> out;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (has_pronoun[c] || clusters[c].mentions.size() > 1) out.push_back(std::move(clusters[c]));
    }
    return out;
  }

 private:
  enum class Kind { male, female, person, neuter, plural };

  struct Mention {
    text::Span span;
    Kind gender;
    std::string head;
    bool definite = false;
    bool prepositional = false;  // object of a preposition
  };

  static bool compatible(Kind mention, text::Gender pronoun) {
    switch (pronoun) {
      case text::Gender::male: return mention == Kind::male || mention == Kind::person;
      case text::Gender::female: return mention == Kind::female || mention == Kind::person;
      case text::Gender::neuter: return mention == Kind::neuter;
      case text::Gender::plural: return mention == Kind::plural;
    }
    return false;
  }

  static const std::unordered_map<std::string, Kind>& nouns() {
    static const std::unordered_map<std::string, Kind> table = [] {
      std::unordered_map<std::string, Kind> t;
      for (auto w : {"man", "boy", "king", "father", "dad", "brother", "husband", "son", "uncle",
                     "grandfather", "grandpa", "prince", "gentleman", "fisherman", "monk",
                     "wizard", "knight", "nephew", "lord", "emperor", "sailor", "farmer",
                     "grandson", "shepherd", "captain", "postman", "master", "keeper"}) {
        t[w] = Kind::male;
      }
      for (auto w : {"woman", "girl", "queen", "mother", "mom", "sister", "wife", "daughter",
                     "aunt", "grandmother", "grandma", "princess", "lady", "niece", "witch",
                     "bride", "granddaughter", "nurse"}) {
        t[w] = Kind::female;
      }
      for (auto w : {"friend", "child", "kid", "baby", "student", "teacher", "doctor", "pilot",
                     "driver", "artist", "scientist", "explorer", "traveler", "traveller",
                     "neighbor", "visitor", "tourist", "villager", "chef", "person", "stranger",
                     "guide", "writer", "singer", "painter", "baker", "hiker", "climber",
                     "engineer", "owner", "guard", "officer", "professor", "judge", "merchant",
                     "cook", "reporter", "photographer", "manager", "passenger", "customer", "volunteer",
                     "biologist", "critic", "veterinarian", "technician", "mayor", "historian",
                     "architect", "hunter", "fisher", "sailor", "neighbour", "apprentice"}) {
        t[w] = Kind::person;
      }
      for (auto w : {"dog", "cat", "fox", "bird", "owl", "rabbit", "horse", "cow", "bear", "lion",
                     "tiger", "elephant", "monkey", "mouse", "fish", "frog", "duck", "turtle",
                     "squirrel", "wolf", "deer", "pig", "goat", "parrot", "dolphin", "whale",
                     "puppy", "kitten", "crow", "gull", "seagull", "boat", "ship", "car", "train",
                     "bus", "house", "tree", "box", "book", "ball", "kite", "cake", "storm",
                     "river", "town", "village", "city", "door", "window", "bridge", "garden",
                     "map", "letter", "phone", "robot", "machine", "lamp", "key", "clock", "hat",
                     "bag", "flower", "rock", "stone", "mountain", "volcano", "island", "castle",
                     "tower", "forest", "lake", "sea", "ocean", "wave", "bottle", "coin", "ring",
                     "camera", "shop", "market", "museum", "school", "library", "painting",
                     "picture", "song", "plan", "idea", "gift", "basket", "apple", "bread",
                     "bicycle", "bike", "plane", "rocket", "star", "moon", "sun", "cloud",
                     "flood", "fire", "wind", "bell", "chest", "treasure", "egg", "nest",
                     "umbrella", "violin", "piano", "guitar", "drum", "statue", "festival",
                     "journey", "trip", "road", "path", "cave", "tent", "wall", "roof",
                     "engine", "computer", "medicine", "potion", "mirror", "candle", "sword",
                     "shield", "crown", "leaf", "seed", "harbor", "harbour", "beach", "field",
                     "farm", "barn", "pond", "meadow", "hill", "valley", "desert", "jungle",
                     "glacier", "earthquake", "storm", "hurricane", "tornado", "building",
                     "hotel", "restaurant", "cafe", "kitchen", "room", "office", "letter",
                     "parcel", "package", "ticket", "suitcase", "compass", "lantern", "pier", "cottage",
                     "instrument", "waterfall", "notebook", "competition", "clinic", "lighthouse",
                     "concert", "newspaper", "article", "project", "blizzard", "summit", "bakery",
                     "magazine", "workshop", "studio", "party", "plant", "crack", "square", "spice",
                     "recipe", "sensor", "cake", "bowl", "wing", "route", "clay", "wheel"}) {
        t[w] = Kind::neuter;
      }
      for (auto w : {"children", "people", "men", "women", "mice", "geese", "sheep", "family",
                     "friends", "parents", "twins", "villagers", "crowd", "team", "students", "couple",
                     "group", "fishermen", "crowds"}) {
        t[w] = Kind::plural;
      }
      return t;
    }();
    return table;
  }

  static const std::unordered_map<std::string, Kind>& names() {
    static const std::unordered_map<std::string, Kind> table = [] {
      std::unordered_map<std::string, Kind> t;
      for (auto w : {"tom", "jack", "leo", "max", "sam", "ben", "paul", "peter", "john", "david",
                     "mark", "luke", "noah", "liam", "oliver", "henry", "james", "carlos",
                     "omar", "raj", "kenji", "ivan", "hugo", "felix", "oscar", "theo"}) {
        t[w] = Kind::male;
      }
      for (auto w : {"anna", "lily", "mia", "emma", "sarah", "lucy", "grace", "maria", "sofia",
                     "nina", "rosa", "amy", "kate", "ella", "zoe", "chloe", "olivia", "yuki",
                     "mei", "priya", "elena", "clara", "alice", "julia"}) {
        t[w] = Kind::female;
      }
      return t;
    }();
    return table;
  }

  static std::vector<std::size_t> sentence_offsets(const std::string& input) {
    std::vector<std::size_t> starts;
    if (text::is_blank(input)) return starts;
    for (const auto& u : text::segment_sentences(input)) starts.push_back(u.span.begin);
    return starts;
  }

  static bool is_preposition(const std::string& lower) {
    static const std::vector<std::string> words = {
        "in", "on", "at", "by", "with", "from", "into", "onto", "under", "over", "behind", "near",
        "across", "along", "through", "between", "beside", "around", "inside", "outside", "of", "to",
        "toward", "towards", "among", "against", "past", "during", "after", "before", "above", "below",
        "about", "like", "without", "beneath", "upon", "within"};
    return std::find(words.begin(), words.end(), lower) != words.end();
  }

  // "him", "them", object "her", and "it" right after a content word
  // ("tested it") are objects of their clause.
  static bool is_object(const text::PronounInfo& info, const std::vector<text::Token>& tokens, std::size_t t,
                        const std::string& input) {
    using text::PronounCase;
    if (info.grammatical_case == PronounCase::object) return true;
    if (info.grammatical_case == PronounCase::ambiguous_object_possessive) {
      const bool adjacent_content = t + 1 < tokens.size() && !has_break(input, tokens[t].end, tokens[t + 1].begin) &&
                                    !text::is_stopword(tokens[t + 1].lower);
      return !adjacent_content;
    }
    if (tokens[t].lower == "it" && t > 0) {
      const auto& prev = tokens[t - 1];
      return !has_break(input, prev.end, tokens[t].begin) && !text::is_stopword(prev.lower);
    }
    return false;
  }

  static bool is_determiner(const std::string& lower) {
    return lower == "a" || lower == "an" || lower == "the" || lower == "this" || lower == "that" ||
           lower == "these" || lower == "those" || lower == "some" || lower == "two" ||
           lower == "three";
  }

  static std::optional<Kind> noun_kind(const std::string& lower, bool* plural_form) {
    const auto& table = nouns();
    *plural_form = false;
    if (auto it = table.find(lower); it != table.end()) return it->second;
    for (std::string_view suffix : {"es", "s"}) {
      if (lower.size() > suffix.size() + 1 && lower.ends_with(suffix)) {
        auto stem = lower.substr(0, lower.size() - suffix.size());
        if (auto it = table.find(stem); it != table.end() && it->second != Kind::plural) {
          *plural_form = true;
          return Kind::plural;
        }
      }
    }
    return std::nullopt;
  }

  static std::vector<Mention> find_mentions(const std::string& input,
                                            const std::vector<text::Token>& tokens) {
    std::vector<Mention> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& tok = tokens[i];
      const bool prepositional = i > 0 && is_preposition(tokens[i - 1].lower);
      if (auto it = names().find(tok.lower);
          it != names().end() && std::isupper(static_cast<unsigned char>(tok.text[0]))) {
        out.push_back({{tok.begin, tok.end}, it->second, tok.lower, false, prepositional});
        continue;
      }
      if (!is_determiner(tok.lower)) {
        // bare plural: "gathered volunteers"
        bool plural = false;
        if (!text::is_stopword(tok.lower)) {
          if (auto kind = noun_kind(tok.lower, &plural); kind == Kind::plural) {
            out.push_back({{tok.begin, tok.end}, Kind::plural, tok.lower, false, prepositional});
          }
        }
        continue;
      }
      // determiner, up to three modifiers, then a lexicon noun
      for (std::size_t k = i + 1; k < tokens.size() && k <= i + 4; ++k) {
        if (text::is_stopword(tokens[k].lower)) break;
        if (has_break(input, tokens[k - 1].end, tokens[k].begin)) break;
        bool plural = false;
        if (auto kind = noun_kind(tokens[k].lower, &plural)) {
          bool definite = tok.lower == "the" || tok.lower == "this" || tok.lower == "that";
          out.push_back({{tok.begin, tokens[k].end}, *kind, tokens[k].lower, definite, prepositional});
          i = k;
          break;
        }
      }
    }
    merge_conjunctions(input, out);
    return out;
  }

  static bool has_break(const std::string& input, std::size_t from, std::size_t to) {
    for (auto p = from; p < to; ++p) {
      if (!text::is_space(input[p])) return true;
    }
    return false;
  }

  // "Tom and Anna" also forms a plural mention, placed after both conjuncts
  // so the recency search meets the group first.
  static void merge_conjunctions(const std::string& input, std::vector<Mention>& mentions) {
    std::vector<Mention> extra;
    for (std::size_t a = 0; a + 1 < mentions.size(); ++a) {
      const auto& left = mentions[a];
      const auto& right = mentions[a + 1];
      auto gap = std::string_view(input).substr(left.span.end, right.span.begin - left.span.end);
      if (text::trim(gap) == "and" && left.gender != Kind::neuter && right.gender != Kind::neuter) {
        extra.push_back({{left.span.begin, right.span.end}, Kind::plural, "", false, left.prepositional});
      }
    }
    for (auto& m : extra) {
      auto pos = std::find_if(mentions.begin(), mentions.end(),
                              [&](const Mention& x) { return x.span.end > m.span.end; });
      mentions.insert(pos, m);
    }
  }
};

}  // namespace retell::backends
