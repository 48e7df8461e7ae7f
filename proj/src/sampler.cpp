#include "ekr/sampler.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"

namespace ekr {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kSeedTag = 0xD6E8FEB86659FD93ULL;
constexpr uint64_t kStreamTag = 0xA5CB3D1FE2C94E7BULL;
constexpr uint64_t kMaxFamilySize = 10000000ULL;
constexpr uint64_t kExactCountLimit = 1ULL << 53;

uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

void check_universe(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw DomainError("kset: need 0 <= k <= n");
    }
    if (n > kMaxSetElements) {
        throw CapacityError("kset: universe exceeds bit-vector capacity");
    }
}

}  // namespace

KSet::KSet(int n) {
    check_universe(n, 0);
    n_ = n;
    words_.assign(static_cast<size_t>((n + 63) / 64), 0);
}

void KSet::set(int i) {
    if (i < 0 || i >= n_) {
        throw DomainError("kset: element out of range");
    }
    words_[static_cast<size_t>(i) >> 6] |= 1ULL << (i & 63);
}

bool KSet::test(int i) const {
    if (i < 0 || i >= n_) {
        return false;
    }
    return (words_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ULL;
}

int KSet::count() const {
    int c = 0;
    for (uint64_t w : words_) {
        c += std::popcount(w);
    }
    return c;
}

int KSet::intersection_count(const KSet& other) const {
    size_t m = std::min(words_.size(), other.words_.size());
    int c = 0;
    for (size_t i = 0; i < m; ++i) {
        c += std::popcount(words_[i] & other.words_[i]);
    }
    return c;
}

std::vector<int> KSet::elements() const {
    std::vector<int> out;
    for (size_t w = 0; w < words_.size(); ++w) {
        uint64_t bits = words_[w];
        while (bits) {
            int b = std::countr_zero(bits);
            out.push_back(static_cast<int>(w * 64) + b);
            bits &= bits - 1;
        }
    }
    return out;
}

bool operator<(const KSet& a, const KSet& b) {
    if (a.words_.size() != b.words_.size()) {
        return a.words_.size() < b.words_.size();
    }
    for (size_t i = a.words_.size(); i-- > 0;) {
        if (a.words_[i] != b.words_[i]) {
            return a.words_[i] < b.words_[i];
        }
    }
    return false;
}

size_t KSetHash::operator()(const KSet& s) const {
    uint64_t h = 1469598103934665603ULL;
    for (uint64_t w : s.words()) {
        h ^= w;
        h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
}

uint64_t RngStream::next() {
    uint64_t z = key + counter * kGolden;
    ++counter;
    return mix64(z);
}

double RngStream::next_unit_open() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
}

uint64_t RngStream::uniform_below(uint64_t bound) {
    if (bound == 0) {
        throw DomainError("uniform_below: bound must be positive");
    }
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t v = next();
        if (v >= threshold) {
            return v % bound;
        }
    }
}

RngStream make_stream(uint64_t master_seed, StreamPurpose purpose, uint64_t index) {
    uint64_t stream_id = (static_cast<uint64_t>(purpose) << 56) | index;
    RngStream s;
    s.key = mix64(mix64(master_seed ^ kSeedTag) ^ mix64(stream_id ^ kStreamTag));
    s.counter = 0;
    return s;
}

KSet random_kset(int n, int k, RngStream& stream) {
    check_universe(n, k);
    KSet ks(n);
    // Floyd's distinct sampling: exactly uniform over the C(n,k) subsets.
    for (int j = n - k; j < n; ++j) {
        uint64_t pos = stream.uniform_below(static_cast<uint64_t>(j) + 1);
        if (ks.test(static_cast<int>(pos))) {
            ks.set(j);
        } else {
            ks.set(static_cast<int>(pos));
        }
    }
    return ks;
}

std::vector<KSet> enumerate_ksets(int n, int k) {
    check_universe(n, k);
    auto total = try_binomial_exact(n, k);
    if (!total || *total > 1000000) {
        throw CapacityError("enumerate_ksets: C(n,k) exceeds 1e6");
    }
    std::vector<KSet> out;
    out.reserve(static_cast<size_t>(*total));
    if (k == 0) {
        out.emplace_back(n);
        return out;
    }
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        KSet ks(n);
        for (int e : idx) ks.set(e);
        out.push_back(std::move(ks));
        int i = 0;
        while (i < k && idx[i] + 1 == (i + 1 < k ? idx[i + 1] : n)) ++i;
        if (i == k) break;
        ++idx[i];
        for (int j = 0; j < i; ++j) idx[j] = j;
    }
    return out;
}

void validate_model(const ModelConfig& cfg) {
    check_universe(cfg.n, cfg.k);
    if (const auto* ind = std::get_if<IndependentModel>(&cfg.model)) {
        if (!(ind->p >= 0.0 && ind->p <= 1.0)) {
            throw DomainError("model: inclusion probability must lie in [0,1]");
        }
    } else {
        const auto& fixed = std::get<FixedSizeModel>(cfg.model);
        auto total = try_binomial_exact(cfg.n, cfg.k);
        if (total && *total < static_cast<uint128>(fixed.t)) {
            throw InfeasibleError("model: t exceeds the number of distinct k-sets");
        }
    }
}

bool uses_poisson_count_approx(const ModelConfig& cfg) {
    const auto* ind = std::get_if<IndependentModel>(&cfg.model);
    if (!ind || ind->p == 0.0) {
        return false;
    }
    auto total = try_binomial_exact(cfg.n, cfg.k);
    return !(total && *total <= static_cast<uint128>(kExactCountLimit));
}

namespace {

uint64_t poisson_count(double lambda, RngStream& stream) {
    // Inversion walk, applied to chunks small enough that exp(-chunk) is
    // representable; the chunk sum is Poisson(lambda) exactly.
    uint64_t total = 0;
    while (lambda > 0.0) {
        double chunk = std::min(lambda, 500.0);
        lambda -= chunk;
        double t = std::exp(-chunk);
        double s = t;
        double u = stream.next_unit_open();
        uint64_t x = 0;
        double cap = chunk + 60.0 * std::sqrt(chunk + 1.0) + 100.0;
        while (u > s && static_cast<double>(x) < cap) {
            ++x;
            t *= chunk / static_cast<double>(x);
            s += t;
        }
        total += x;
    }
    return total;
}

uint64_t binomial_count_by_skips(uint64_t universe, double p, RngStream& stream) {
    if (p >= 1.0) {
        return universe;
    }
    double logq = std::log1p(-p);
    uint64_t count = 0;
    uint64_t next_pos = 0;
    while (next_pos < universe) {
        double u = stream.next_unit_open();
        double skip_d = std::floor(std::log(u) / logq);
        if (!(skip_d >= 0.0)) skip_d = 0.0;
        if (skip_d >= static_cast<double>(universe - next_pos)) {
            break;
        }
        next_pos += static_cast<uint64_t>(skip_d);
        ++count;
        ++next_pos;
    }
    return count;
}

}  // namespace

Family sample_family(const ModelConfig& cfg) {
    validate_model(cfg);
    Family fam;
    fam.model = cfg;
    RngStream stream = make_stream(cfg.master_seed, StreamPurpose::trial, cfg.trial_index);

    uint64_t want = 0;
    if (const auto* ind = std::get_if<IndependentModel>(&cfg.model)) {
        if (ind->p == 0.0) {
            return fam;
        }
        double expected = ind->p * binomial_double(cfg.n, cfg.k);
        if (expected > static_cast<double>(kMaxFamilySize)) {
            throw SaturationError("sample_family: expected family size exceeds 1e7");
        }
        auto total = try_binomial_exact(cfg.n, cfg.k);
        if (total && *total <= static_cast<uint128>(kExactCountLimit)) {
            want = binomial_count_by_skips(static_cast<uint64_t>(*total), ind->p, stream);
        } else {
            want = poisson_count(expected, stream);
        }
    } else {
        want = std::get<FixedSizeModel>(cfg.model).t;
    }
    if (want > kMaxFamilySize) {
        throw SaturationError("sample_family: family size exceeds 1e7");
    }
    if (want == 0) {
        return fam;
    }

    std::unordered_set<KSet, KSetHash> seen;
    seen.reserve(static_cast<size_t>(want) * 2);
    fam.sets.reserve(static_cast<size_t>(want));
    uint64_t draws = 0;
    uint64_t cap = 100 * want;
    while (seen.size() < want) {
        if (++draws > cap) {
            throw SaturationError("sample_family: rejection cap hit; family too dense");
        }
        KSet ks = random_kset(cfg.n, cfg.k, stream);
        if (seen.insert(ks).second) {
            fam.sets.push_back(std::move(ks));
        }
    }
    return fam;
}

std::string serialize_family(const Family& f) {
    std::ostringstream out;
    out << f.model.n << ' ' << f.model.k << ' ';
    if (const auto* ind = std::get_if<IndependentModel>(&f.model.model)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "independent:%.17g", ind->p);
        out << buf;
    } else {
        out << "fixed:" << std::get<FixedSizeModel>(f.model.model).t;
    }
    out << ' ' << f.model.master_seed << ' ' << f.model.trial_index << '\n';
    for (const KSet& s : f.sets) {
        auto elems = s.elements();
        for (size_t i = 0; i < elems.size(); ++i) {
            if (i) out << ',';
            out << elems[i];
        }
        out << '\n';
    }
    return out.str();
}

Family parse_family(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) {
        throw DomainError("parse_family: missing header");
    }
    ModelConfig cfg;
    char model_buf[64];
    if (std::sscanf(header.c_str(), "%d %d %63s %" SCNu64 " %" SCNu64,
                    &cfg.n, &cfg.k, model_buf, &cfg.master_seed,
                    &cfg.trial_index) != 5) {
        throw DomainError("parse_family: malformed header");
    }
    std::string model_tok(model_buf);
    if (model_tok.rfind("independent:", 0) == 0) {
        cfg.model = IndependentModel{std::strtod(model_tok.c_str() + 12, nullptr)};
    } else if (model_tok.rfind("fixed:", 0) == 0) {
        cfg.model = FixedSizeModel{std::strtoull(model_tok.c_str() + 6, nullptr, 10)};
    } else {
        throw DomainError("parse_family: unknown model token");
    }
    validate_model(cfg);

    Family fam;
    fam.model = cfg;
    std::unordered_set<KSet, KSetHash> seen;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() && cfg.k > 0) {
            continue;
        }
        KSet ks(cfg.n);
        if (cfg.k > 0) {
            std::istringstream ls(line);
            std::string tok;
            while (std::getline(ls, tok, ',')) {
                int e = 0;
                try {
                    e = std::stoi(tok);
                } catch (const std::exception&) {
                    throw DomainError("parse_family: bad element token");
                }
                if (ks.test(e)) {
                    throw DomainError("parse_family: duplicate element in set");
                }
                ks.set(e);
            }
        }
        if (ks.count() != cfg.k) {
            throw DomainError("parse_family: set size differs from k");
        }
        if (!seen.insert(ks).second) {
            throw DomainError("parse_family: duplicate set");
        }
        fam.sets.push_back(std::move(ks));
    }
    return fam;
}

}  // namespace ekr
