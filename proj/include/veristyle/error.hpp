#pragma once

#include <stdexcept>
#include <string>

namespace veristyle {

// Base class for all toolkit errors. Subclasses carry the contract name of
// the failure so callers can match on type rather than message text.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileUnreadable : Error {
    explicit FileUnreadable(const std::string& path)
        : Error("cannot read file: " + path) {}
};

struct SchemaViolation : Error {
    long line;
    SchemaViolation(long line_, const std::string& reason)
        : Error("schema violation at line " + std::to_string(line_) + ": " + reason),
          line(line_) {}
};

struct DuplicateParticipant : Error {
    explicit DuplicateParticipant(const std::string& id)
        : Error("duplicate participant_id: " + id) {}
};

struct NotDeceptive : Error {
    NotDeceptive() : Error("lie_word_ratio requires a deceptive statement") {}
};

struct EmptyCorpus : Error {
    EmptyCorpus() : Error("corpus holds no records") {}
};

struct EmptyText : Error {
    EmptyText() : Error("operation requires non-empty text") {}
};

struct MalformedHeader : Error {
    using Error::Error;
};

struct UnknownCategoryId : Error {
    long line;
    UnknownCategoryId(long line_, int id)
        : Error("unknown category id " + std::to_string(id) + " at line " + std::to_string(line_)),
          line(line_) {}
};

struct TooFewPairs : Error {
    using Error::Error;
};

struct VocabularyMismatch : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct DegenerateVariance : Error {
    using Error::Error;
};

struct ConstantInput : Error {
    ConstantInput() : Error("input vector is constant") {}
};

struct TooFewPoints : Error {
    using Error::Error;
};

struct SingleClass : Error {
    SingleClass() : Error("training data holds a single class") {}
};

struct EmptyMatrix : Error {
    EmptyMatrix() : Error("feature matrix is empty") {}
};

struct MissingFeature : Error {
    explicit MissingFeature(const std::string& name)
        : Error("row lacks model feature: " + name) {}
};

struct TooFewGroups : Error {
    using Error::Error;
};

struct EmptyGrid : Error {
    EmptyGrid() : Error("hyperparameter grid is empty") {}
};

struct MissingProbabilities : Error {
    MissingProbabilities() : Error("cv report lacks out-of-fold probabilities") {}
};

struct RankDeficient : Error {
    RankDeficient() : Error("SDE and IM are exactly collinear") {}
};

struct TooFewRows : Error {
    using Error::Error;
};

struct MissingResource : Error {
    explicit MissingResource(const std::string& name)
        : Error("missing resource: " + name) {}
};

}
