#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "veristyle/error.hpp"
#include "veristyle/mathx.hpp"
#include "veristyle/textproc.hpp"

// Corpus data model: paired truthful/deceptive statements with annotated
// lie spans, memory and control ratings, lying-profile and social-
// desirability questionnaire scores.
//
// File format: UTF-8, one JSON object per line, snake_case keys, enums as
// lowercase strings. The first line must be the schema header
// {"veristyle_schema": 1}.

namespace veristyle::corpus {

enum class Veracity { Truthful, Deceptive };

enum class LieSource { PersonalExperience, WitnessedOther, SecondhandStory, Imagined, FuturePlan };

enum class Gender { Female, Male, Unspecified };

// Eleven predefined events plus the free-recall fallback.
enum class Event {
    JobInterview,
    HospitalizedSurgery,
    InvolvedCarAccident,
    CausingCarAccident,
    CheatingExam,
    CheatingPartner,
    EndingRelationship,
    SpeedingFine,
    GettingFired,
    MissingDeadline,
    NoTicket,
    FreeRecall,
};

inline constexpr int kEventCount = 12;
inline constexpr int kMaxEmbeddedLies = 20;
inline constexpr std::size_t kSoftMinChars = 300;

struct EventInfo {
    Event event;
    std::string_view id;     // lowercase wire token
    std::string_view label;  // display name
};

inline const std::array<EventInfo, kEventCount>& event_table() {
    static const std::array<EventInfo, kEventCount> table = {{
        {Event::JobInterview, "job_interview", "A job interview for your dream job"},
        {Event::HospitalizedSurgery, "hospitalized_surgery", "Being hospitalized and undergoing surgery"},
        {Event::InvolvedCarAccident, "involved_car_accident", "Being involved in a car accident"},
        {Event::CausingCarAccident, "causing_car_accident", "Causing a car accident"},
        {Event::CheatingExam, "cheating_exam", "Cheating on an exam"},
        {Event::CheatingPartner, "cheating_partner", "Cheating on your partner"},
        {Event::EndingRelationship, "ending_relationship", "Ending a long romantic relationship"},
        {Event::SpeedingFine, "speeding_fine", "Getting a speeding fine"},
        {Event::GettingFired, "getting_fired", "Getting fired"},
        {Event::MissingDeadline, "missing_deadline", "Missing a deadline at work because of bad organization"},
        {Event::NoTicket, "no_ticket", "Taking the bus/train without the ticket"},
        {Event::FreeRecall, "free_recall", "None of them (free recall)"},
    }};
    return table;
}

inline std::string_view event_id(Event e) { return event_table()[static_cast<int>(e)].id; }
inline std::string_view event_label(Event e) { return event_table()[static_cast<int>(e)].label; }

inline std::optional<Event> event_from_id(std::string_view id) {
    for (const auto& info : event_table())
        if (info.id == id) return info.event;
    return std::nullopt;
}

inline std::string_view source_id(LieSource s) {
    switch (s) {
        case LieSource::PersonalExperience: return "personal_experience";
        case LieSource::WitnessedOther: return "witnessed_other";
        case LieSource::SecondhandStory: return "secondhand_story";
        case LieSource::Imagined: return "imagined";
        case LieSource::FuturePlan: return "future_plan";
    }
    return "";
}

inline std::optional<LieSource> source_from_id(std::string_view id) {
    for (auto s : {LieSource::PersonalExperience, LieSource::WitnessedOther,
                   LieSource::SecondhandStory, LieSource::Imagined, LieSource::FuturePlan})
        if (source_id(s) == id) return s;
    return std::nullopt;
}

struct EmbeddedLie {
    std::string span_text;  // excerpt copied from the deceptive statement
    int deceptiveness = 1;  // 1-5
    int centrality = 1;     // 1-5
    LieSource source = LieSource::Imagined;
};

struct Statement {
    std::string text;
    Veracity veracity = Veracity::Truthful;
    std::vector<EmbeddedLie> embedded_lies;  // empty when truthful
};

struct MemoryRatings {
    int time_months = 1;    // 1-25 bucket
    int recollection = 1;   // 1-5
    int importance = 1;     // 1-5
    int accuracy = 1;       // 1-5
    double valence = 0.0;   // half-point grid in [-1, 1]
};

struct ControlRatings {
    int difficulty = 1;
    int clarity = 1;
    int motivation_truth = 1;
    int motivation_lie = 1;
};

struct LieProfileScores {
    double frequency = 0.0;
    double ability = 0.0;
    double negativity = 0.0;
    double contextuality = 0.0;
};

struct BidrScores {
    double sde = 0.0;
    double im = 0.0;
};

struct Demographics {
    int age = 0;
    Gender gender = Gender::Unspecified;
};

struct ParticipantRecord {
    std::string participant_id;
    Event event = Event::FreeRecall;
    Statement truthful;
    Statement deceptive;
    MemoryRatings memory;
    ControlRatings controls;
    Demographics demographics;
    LieProfileScores lie_profile;
    BidrScores bidr;
};

struct Provenance {
    std::string source_path;
    int schema_version = 1;
};

struct Corpus {
    std::vector<ParticipantRecord> records;
    Provenance provenance;
};

struct Warning {
    long line = 0;
    std::string participant_id;
    std::string message;
};

struct LoadResult {
    Corpus corpus;
    std::vector<Warning> warnings;
};

// Words inside lie spans divided by the words of the deceptive text, clamped
// to [0, 1]. Span word counts are computed independently of the parent text.
inline double lie_word_ratio(const Statement& stmt) {
    if (stmt.veracity != Veracity::Deceptive) throw NotDeceptive();
    const std::size_t total = text::word_count(stmt.text);
    if (total == 0) return 0.0;
    std::size_t lie_words = 0;
    for (const auto& lie : stmt.embedded_lies) lie_words += text::word_count(lie.span_text);
    const double r = static_cast<double>(lie_words) / static_cast<double>(total);
    return r > 1.0 ? 1.0 : r;
}

namespace detail {

using json = nlohmann::json;

inline const json& require(const json& obj, const char* key, long line) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaViolation(line, std::string("missing field '") + key + "'");
    return *it;
}

inline int require_int(const json& obj, const char* key, long line, int lo, int hi) {
    const auto& v = require(obj, key, line);
    if (!v.is_number_integer())
        throw SchemaViolation(line, std::string("field '") + key + "' must be an integer");
    const int i = v.get<int>();
    if (i < lo || i > hi)
        throw SchemaViolation(line, std::string("field '") + key + "' out of range [" +
                                        std::to_string(lo) + "," + std::to_string(hi) + "]");
    return i;
}

inline double require_finite(const json& obj, const char* key, long line) {
    const auto& v = require(obj, key, line);
    if (!v.is_number()) throw SchemaViolation(line, std::string("field '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaViolation(line, std::string("field '") + key + "' must be finite");
    return d;
}

inline std::string require_string(const json& obj, const char* key, long line) {
    const auto& v = require(obj, key, line);
    if (!v.is_string()) throw SchemaViolation(line, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline Statement parse_statement(const json& obj, Veracity expected, long line) {
    Statement s;
    s.text = require_string(obj, "text", line);
    const std::string v = require_string(obj, "veracity", line);
    if (v == "truthful")
        s.veracity = Veracity::Truthful;
    else if (v == "deceptive")
        s.veracity = Veracity::Deceptive;
    else
        throw SchemaViolation(line, "unknown veracity '" + v + "'");
    if (s.veracity != expected)
        throw SchemaViolation(line, "statement veracity does not match its slot");

    const auto& lies = require(obj, "embedded_lies", line);
    if (!lies.is_array()) throw SchemaViolation(line, "embedded_lies must be an array");
    const std::size_t stmt_words = text::word_count(s.text);
    for (const auto& item : lies) {
        EmbeddedLie lie;
        lie.span_text = require_string(item, "span_text", line);
        if (text::word_count(lie.span_text) < 1)
            throw SchemaViolation(line, "span_text must hold at least one word");
        if (text::word_count(lie.span_text) > stmt_words)
            throw SchemaViolation(line, "span_text longer than its statement");
        lie.deceptiveness = require_int(item, "deceptiveness", line, 1, 5);
        lie.centrality = require_int(item, "centrality", line, 1, 5);
        const std::string src = require_string(item, "source", line);
        const auto parsed = source_from_id(src);
        if (!parsed) throw SchemaViolation(line, "unknown source '" + src + "'");
        lie.source = *parsed;
        s.embedded_lies.push_back(std::move(lie));
    }
    if (expected == Veracity::Truthful && !s.embedded_lies.empty())
        throw SchemaViolation(line, "truthful statement carries embedded lies");
    if (expected == Veracity::Deceptive &&
        (s.embedded_lies.empty() || s.embedded_lies.size() > kMaxEmbeddedLies))
        throw SchemaViolation(line, "deceptive statement needs 1-" + std::to_string(kMaxEmbeddedLies) +
                                        " embedded lies");
    return s;
}

inline ParticipantRecord parse_record(const json& obj, long line) {
    ParticipantRecord r;
    r.participant_id = require_string(obj, "participant_id", line);
    if (r.participant_id.empty()) throw SchemaViolation(line, "participant_id must be non-empty");

    const std::string ev = require_string(obj, "event", line);
    const auto parsed_event = event_from_id(ev);
    if (!parsed_event) throw SchemaViolation(line, "unknown event '" + ev + "'");
    r.event = *parsed_event;

    r.truthful = parse_statement(require(obj, "truthful", line), Veracity::Truthful, line);
    r.deceptive = parse_statement(require(obj, "deceptive", line), Veracity::Deceptive, line);

    const auto& mem = require(obj, "memory", line);
    r.memory.time_months = require_int(mem, "time_months", line, 1, 25);
    r.memory.recollection = require_int(mem, "recollection", line, 1, 5);
    r.memory.importance = require_int(mem, "importance", line, 1, 5);
    r.memory.accuracy = require_int(mem, "accuracy", line, 1, 5);
    r.memory.valence = require_finite(mem, "valence", line);
    const double v2 = r.memory.valence * 2.0;
    if (r.memory.valence < -1.0 || r.memory.valence > 1.0 || v2 != std::round(v2))
        throw SchemaViolation(line, "valence must lie on the half-point grid in [-1,1]");

    const auto& ctl = require(obj, "controls", line);
    r.controls.difficulty = require_int(ctl, "difficulty", line, 1, 5);
    r.controls.clarity = require_int(ctl, "clarity", line, 1, 5);
    r.controls.motivation_truth = require_int(ctl, "motivation_truth", line, 1, 5);
    r.controls.motivation_lie = require_int(ctl, "motivation_lie", line, 1, 5);

    const auto& demo = require(obj, "demographics", line);
    r.demographics.age = require_int(demo, "age", line, 0, 150);
    const std::string g = require_string(demo, "gender", line);
    if (g == "female")
        r.demographics.gender = Gender::Female;
    else if (g == "male")
        r.demographics.gender = Gender::Male;
    else if (g == "unspecified")
        r.demographics.gender = Gender::Unspecified;
    else
        throw SchemaViolation(line, "unknown gender '" + g + "'");

    const auto& lp = require(obj, "lie_profile", line);
    r.lie_profile.frequency = require_finite(lp, "frequency", line);
    r.lie_profile.ability = require_finite(lp, "ability", line);
    r.lie_profile.negativity = require_finite(lp, "negativity", line);
    r.lie_profile.contextuality = require_finite(lp, "contextuality", line);

    const auto& bidr = require(obj, "bidr", line);
    r.bidr.sde = require_finite(bidr, "sde", line);
    r.bidr.im = require_finite(bidr, "im", line);
    return r;
}

}

// Loads and validates a corpus file. Hard violations (schema, ranges,
// pairing, duplicates) always reject the record; soft rules (statement
// shorter than 300 characters) warn in non-strict mode and reject in strict
// mode.
inline LoadResult load_corpus(const std::string& path, bool strict = false) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);

    LoadResult out;
    out.corpus.provenance.source_path = path;

    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::map<std::string, long> seen_ids;

    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaViolation(line_no, std::string("invalid JSON: ") + e.what());
        }

        if (!header_seen) {
            const auto it = obj.find("veristyle_schema");
            if (it == obj.end() || !it->is_number_integer())
                throw SchemaViolation(line_no, "first line must be the schema header");
            const int version = it->get<int>();
            if (version != 1)
                throw SchemaViolation(line_no, "unsupported schema version " + std::to_string(version));
            out.corpus.provenance.schema_version = version;
            header_seen = true;
            continue;
        }

        ParticipantRecord rec = detail::parse_record(obj, line_no);
        if (auto [it, inserted] = seen_ids.emplace(rec.participant_id, line_no); !inserted)
            throw DuplicateParticipant(rec.participant_id);

        for (const auto* stmt : {&rec.truthful, &rec.deceptive}) {
            if (stmt->text.size() < kSoftMinChars) {
                const std::string msg =
                    std::string(stmt->veracity == Veracity::Truthful ? "truthful" : "deceptive") +
                    " statement shorter than " + std::to_string(kSoftMinChars) + " characters";
                if (strict) throw SchemaViolation(line_no, msg);
                out.warnings.push_back({line_no, rec.participant_id, msg});
            }
        }
        out.corpus.records.push_back(std::move(rec));
    }
    if (!header_seen) throw SchemaViolation(0, "file lacks the schema header line");
    if (out.corpus.records.empty()) throw EmptyCorpus();
    return out;
}

namespace detail {

inline json statement_to_json(const Statement& s) {
    json obj = json::object();
    obj["text"] = s.text;
    obj["veracity"] = s.veracity == Veracity::Truthful ? "truthful" : "deceptive";
    json lies = json::array();
    for (const auto& lie : s.embedded_lies) {
        json l = json::object();
        l["span_text"] = lie.span_text;
        l["deceptiveness"] = lie.deceptiveness;
        l["centrality"] = lie.centrality;
        l["source"] = std::string(source_id(lie.source));
        lies.push_back(std::move(l));
    }
    obj["embedded_lies"] = std::move(lies);
    return obj;
}

}

inline nlohmann::json record_to_json(const ParticipantRecord& r) {
    using nlohmann::json;
    json obj = json::object();
    obj["participant_id"] = r.participant_id;
    obj["event"] = std::string(event_id(r.event));
    obj["truthful"] = detail::statement_to_json(r.truthful);
    obj["deceptive"] = detail::statement_to_json(r.deceptive);
    obj["memory"] = {{"time_months", r.memory.time_months},
                     {"recollection", r.memory.recollection},
                     {"importance", r.memory.importance},
                     {"accuracy", r.memory.accuracy},
                     {"valence", r.memory.valence}};
    obj["controls"] = {{"difficulty", r.controls.difficulty},
                       {"clarity", r.controls.clarity},
                       {"motivation_truth", r.controls.motivation_truth},
                       {"motivation_lie", r.controls.motivation_lie}};
    obj["demographics"] = {{"age", r.demographics.age},
                           {"gender", r.demographics.gender == Gender::Female     ? "female"
                                      : r.demographics.gender == Gender::Male     ? "male"
                                                                                  : "unspecified"}};
    obj["lie_profile"] = {{"frequency", r.lie_profile.frequency},
                          {"ability", r.lie_profile.ability},
                          {"negativity", r.lie_profile.negativity},
                          {"contextuality", r.lie_profile.contextuality}};
    obj["bidr"] = {{"sde", r.bidr.sde}, {"im", r.bidr.im}};
    return obj;
}

inline void save_corpus(const Corpus& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FileUnreadable(path);
    out << "{\"veristyle_schema\": " << c.provenance.schema_version << "}\n";
    for (const auto& r : c.records) out << record_to_json(r).dump() << "\n";
}

// --- descriptive statistics -------------------------------------------------

struct Msd {
    double mean = mathx::kNaN;
    double sd = mathx::kNaN;
    double median = mathx::kNaN;
};

inline Msd msd(const std::vector<double>& v) {
    if (v.empty()) return {};
    return {mathx::mean(v), v.size() > 1 ? mathx::stddev(v) : 0.0, mathx::median(v)};
}

struct VeracityDescriptives {
    std::size_t n = 0;
    Msd words;
    Msd sentences;
};

// Table 3 / Table 3S shaped summary. Deceptiveness and centrality aggregate
// per-participant means, which is how a non-integer median can arise.
struct DescriptivesReport {
    VeracityDescriptives truthful;
    VeracityDescriptives deceptive;
    Msd lie_span_words;     // total words inside lie spans, per record
    Msd absolute_lies;      // lie-span count per record
    Msd standardized_ratio; // lie_word_ratio per record
    Msd deceptiveness;      // per-record mean rating
    Msd centrality;         // per-record mean rating
    std::map<std::string, double> source_percentages;  // over all embedded lies
    Msd time_months;
    Msd recollection;
    Msd importance;
    Msd accuracy;
    Msd valence;
};

inline DescriptivesReport corpus_descriptives(const Corpus& c) {
    if (c.records.empty()) throw EmptyCorpus();
    DescriptivesReport rep;

    std::vector<double> t_words, t_sents, d_words, d_sents;
    std::vector<double> span_words, abs_lies, ratios, dec_means, cen_means;
    std::vector<double> mem_time, mem_rec, mem_imp, mem_acc, mem_val;
    std::map<std::string, std::size_t> source_counts;
    std::size_t total_lies = 0;

    for (const auto& r : c.records) {
        const auto tt = text::tokenize(r.truthful.text);
        const auto dt = text::tokenize(r.deceptive.text);
        t_words.push_back(static_cast<double>(tt.tokens.size()));
        t_sents.push_back(static_cast<double>(tt.sentences.size()));
        d_words.push_back(static_cast<double>(dt.tokens.size()));
        d_sents.push_back(static_cast<double>(dt.sentences.size()));

        std::size_t words_in_spans = 0;
        double dec_sum = 0.0, cen_sum = 0.0;
        for (const auto& lie : r.deceptive.embedded_lies) {
            words_in_spans += text::word_count(lie.span_text);
            dec_sum += lie.deceptiveness;
            cen_sum += lie.centrality;
            ++source_counts[std::string(source_id(lie.source))];
            ++total_lies;
        }
        const auto n_lies = static_cast<double>(r.deceptive.embedded_lies.size());
        span_words.push_back(static_cast<double>(words_in_spans));
        abs_lies.push_back(n_lies);
        ratios.push_back(lie_word_ratio(r.deceptive));
        if (n_lies > 0) {
            dec_means.push_back(dec_sum / n_lies);
            cen_means.push_back(cen_sum / n_lies);
        }

        mem_time.push_back(r.memory.time_months);
        mem_rec.push_back(r.memory.recollection);
        mem_imp.push_back(r.memory.importance);
        mem_acc.push_back(r.memory.accuracy);
        mem_val.push_back(r.memory.valence);
    }

    rep.truthful = {c.records.size(), msd(t_words), msd(t_sents)};
    rep.deceptive = {c.records.size(), msd(d_words), msd(d_sents)};
    rep.lie_span_words = msd(span_words);
    rep.absolute_lies = msd(abs_lies);
    rep.standardized_ratio = msd(ratios);
    rep.deceptiveness = msd(dec_means);
    rep.centrality = msd(cen_means);
    for (auto s : {LieSource::PersonalExperience, LieSource::WitnessedOther,
                   LieSource::SecondhandStory, LieSource::Imagined, LieSource::FuturePlan}) {
        const auto key = std::string(source_id(s));
        const auto count = source_counts.count(key) ? source_counts[key] : 0;
        rep.source_percentages[key] =
            total_lies == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total_lies);
    }
    rep.time_months = msd(mem_time);
    rep.recollection = msd(mem_rec);
    rep.importance = msd(mem_imp);
    rep.accuracy = msd(mem_acc);
    rep.valence = msd(mem_val);
    return rep;
}

}
