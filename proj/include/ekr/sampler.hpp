#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ekr {

inline constexpr int kMaxSetElements = 1024;

// Subset of {0,...,n-1} as a packed bit vector. Capacity kMaxSetElements.
class KSet {
public:
    KSet() = default;
    explicit KSet(int n);

    int universe_size() const { return n_; }
    void set(int i);
    bool test(int i) const;
    int count() const;
    int intersection_count(const KSet& other) const;
    std::vector<int> elements() const;
    const std::vector<uint64_t>& words() const { return words_; }

    friend bool operator==(const KSet& a, const KSet& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }
    // Bit patterns compared as integers.
    friend bool operator<(const KSet& a, const KSet& b);

private:
    int n_ = 0;
    std::vector<uint64_t> words_;
};

struct KSetHash {
    size_t operator()(const KSet& s) const;
};

// Counter-based stream: the draw sequence is a pure function of the key, so
// any (seed, purpose, index) triple can be replayed independently of thread
// scheduling.
struct RngStream {
    uint64_t key = 0;
    uint64_t counter = 0;

    uint64_t next();
    // Uniform in the open interval (0,1).
    double next_unit_open();
    // Uniform over {0,...,bound-1}, exact by rejection.
    uint64_t uniform_below(uint64_t bound);
};

enum class StreamPurpose : uint64_t {
    trial = 1,
    bootstrap = 2,
};

RngStream make_stream(uint64_t master_seed, StreamPurpose purpose, uint64_t index);

struct IndependentModel {
    double p = 0.0;
};

struct FixedSizeModel {
    uint64_t t = 0;
};

using ModelSpec = std::variant<IndependentModel, FixedSizeModel>;

struct ModelConfig {
    int n = 0;
    int k = 0;
    ModelSpec model;
    uint64_t master_seed = 42;
    uint64_t trial_index = 0;
};

struct Family {
    std::vector<KSet> sets;
    ModelConfig model;

    size_t size() const { return sets.size(); }
};

void validate_model(const ModelConfig& cfg);

// Uniform over all C(n,k) subsets (Floyd's distinct sampling).
KSet random_kset(int n, int k, RngStream& stream);

// All k-subsets in increasing bit-pattern order; guarded at C(n,k) <= 1e6.
std::vector<KSet> enumerate_ksets(int n, int k);

// Independent mode: the family size is Binomial(C(n,k), p), drawn exactly by
// geometric skip counting while C(n,k) <= 2^53, then that many distinct
// uniform k-sets. Beyond 2^53 the count falls back to Poisson(p*C(n,k));
// uses_poisson_count_approx reports which path a config takes.
Family sample_family(const ModelConfig& cfg);

bool uses_poisson_count_approx(const ModelConfig& cfg);

// Text form: header "n k model seed trial", then one line per set with
// comma-separated ascending elements. model is "independent:<p>" or "fixed:<t>".
std::string serialize_family(const Family& f);
Family parse_family(const std::string& text);

}  // namespace ekr
