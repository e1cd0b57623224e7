#include "blpp/field.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "blpp/errors.hpp"

namespace blpp {

BrownianField::BrownianField(const GridSpec& spec, uint64_t seed) : spec_(spec), seed_(seed) {
    spec_.validate();
    const int L = spec_.lines();
    const int U = spec_.units();
    blocks_.assign(L, std::vector<std::vector<double>>(U));
    lines_.assign(L, std::vector<double>(spec_.width(), 0.0));
    for (int ls = 0; ls < L; ++ls) {
        const int m = spec_.m_min + ls;
        for (int us = 0; us < U; ++us) {
            const int i = spec_.x_min + us;
            fill_block(i, m, derive(seed, Stream::Block, i, m), 0.0, blocks_[ls][us]);
        }
        rebuild_line_from(ls, 0);
    }
}

void BrownianField::fill_block(int /*unit*/, int /*line*/, uint64_t seed, double drift,
                               std::vector<double>& out) const {
    const int G = spec_.grid;
    const double sigma = std::sqrt(1.0 / G);
    const double mean = drift / G;
    Rng rng(seed);
    out.resize(G);
    for (int k = 0; k < G; ++k) out[k] = mean + sigma * rng.normal();
}

// Rebuild the cumulative line values from block `unit_slot_idx` rightwards.
// The anchor value at the block's left edge is left untouched, so a suffix
// rebuild produces the same bits as rebuilding the whole line.
void BrownianField::rebuild_line_from(int line_slot_idx, int unit_slot_idx) {
    const int G = spec_.grid;
    auto& vals = lines_[line_slot_idx];
    double acc = vals[unit_slot_idx * G];
    for (int us = unit_slot_idx; us < spec_.units(); ++us) {
        const auto& inc = blocks_[line_slot_idx][us];
        for (int k = 0; k < G; ++k) {
            acc += inc[k];
            vals[us * G + k + 1] = acc;
        }
    }
}

double BrownianField::value_at_index(int m, int j) const {
    require(spec_.line_in_range(m), "line outside field range");
    require(spec_.index_in_range(j), "grid index outside field range");
    return lines_[line_slot(m)][j];
}

double BrownianField::value_at(int m, double x) const {
    return value_at_index(m, spec_.index_of(x));
}

std::span<const double> BrownianField::block_increments(int unit, int line) const {
    require(line_in_block_range(unit, line, spec_), "block outside field range");
    const auto& b = blocks_[line_slot(line)][unit_slot(unit)];
    return {b.data(), b.size()};
}

bool line_in_block_range(int unit, int line, const GridSpec& spec) {
    return line >= spec.m_min && line <= spec.m_max && unit >= spec.x_min && unit < spec.x_max;
}

FieldDelta BrownianField::resample_block(int unit, int line, uint64_t seed, double drift) {
    require(line_in_block_range(unit, line, spec_), "block outside field range");
    FieldDelta delta;
    delta.unit = unit;
    delta.line = line;
    delta.old_increments = blocks_[line_slot(line)][unit_slot(unit)];
    fill_block(unit, line, seed, drift, delta.new_increments);
    double old_end = 0.0, new_end = 0.0;
    for (double v : delta.old_increments) old_end += v;
    for (double v : delta.new_increments) new_end += v;
    delta.shift = new_end - old_end;
    apply_delta(delta);
    return delta;
}

void BrownianField::apply_delta(const FieldDelta& delta) {
    require(line_in_block_range(delta.unit, delta.line, spec_), "delta outside field range");
    blocks_[line_slot(delta.line)][unit_slot(delta.unit)] = delta.new_increments;
    rebuild_line_from(line_slot(delta.line), unit_slot(delta.unit));
}

void BrownianField::revert_delta(const FieldDelta& delta) {
    require(line_in_block_range(delta.unit, delta.line, spec_), "delta outside field range");
    blocks_[line_slot(delta.line)][unit_slot(delta.unit)] = delta.old_increments;
    rebuild_line_from(line_slot(delta.line), unit_slot(delta.unit));
}

double BrownianField::block_path_range(int unit, int line) const {
    const auto inc = block_increments(unit, line);
    double acc = 0.0, lo = 0.0, hi = 0.0;
    for (double v : inc) {
        acc += v;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    return hi - lo;
}

BrownianField BrownianField::scaled_copy(int beta) const {
    require(beta >= 1, "scaling factor must be a positive integer");
    if (beta == 1) return *this;
    require(spec_.grid % beta == 0, "scaling factor must divide the grid resolution");

    BrownianField out;
    out.spec_ = GridSpec{spec_.grid / beta, spec_.x_min * beta, spec_.x_max * beta, spec_.m_min,
                         spec_.m_max};
    out.seed_ = seed_;
    const int L = out.spec_.lines();
    const int U = out.spec_.units();
    const int Gp = out.spec_.grid;
    const double root = std::sqrt(static_cast<double>(beta));
    out.blocks_.assign(L, std::vector<std::vector<double>>(U));
    out.lines_.assign(L, std::vector<double>(out.spec_.width(), 0.0));
    // New unit block [i', i'+1] covers original x in [i'/beta, (i'+1)/beta];
    // its Gp increments are sqrt(beta) times consecutive original increments.
    for (int ls = 0; ls < L; ++ls) {
        for (int us = 0; us < U; ++us) {
            auto& b = out.blocks_[ls][us];
            b.resize(Gp);
            const int src_unit_slot = us / beta;
            const int src_offset = (us % beta) * Gp;
            const auto& src = blocks_[ls][src_unit_slot];
            for (int k = 0; k < Gp; ++k) b[k] = root * src[src_offset + k];
        }
        out.rebuild_line_from(ls, 0);
    }
    return out;
}

void BrownianField::dump(std::ostream& os) const {
    os << "BLPPFIELD v1 G=" << spec_.grid << " x=" << spec_.x_min << ":" << spec_.x_max
       << " m=" << spec_.m_min << ":" << spec_.m_max << "\n";
    for (const auto& vals : lines_) {
        os.write(reinterpret_cast<const char*>(vals.data()),
                 static_cast<std::streamsize>(vals.size() * sizeof(double)));
    }
}

BrownianField BrownianField::load(std::istream& is) {
    // header layout: BLPPFIELD v1 G=<int> x=<a>:<b> m=<a>:<b>
    std::string header;
    std::getline(is, header);
    GridSpec spec;
    {
        std::istringstream hs(header);
        std::string magic, version, gtok, xtok, mtok;
        hs >> magic >> version >> gtok >> xtok >> mtok;
        require(magic == "BLPPFIELD" && version == "v1", "unrecognized snapshot header");
        require(gtok.rfind("G=", 0) == 0 && xtok.rfind("x=", 0) == 0 && mtok.rfind("m=", 0) == 0,
                "malformed snapshot header");
        auto parse_pair = [](const std::string& tok, int& a, int& b) {
            const std::string body = tok.substr(2);
            const auto colon = body.find(':');
            require(colon != std::string::npos, "malformed snapshot header");
            a = std::stoi(body.substr(0, colon));
            b = std::stoi(body.substr(colon + 1));
        };
        spec.grid = std::stoi(gtok.substr(2));
        parse_pair(xtok, spec.x_min, spec.x_max);
        parse_pair(mtok, spec.m_min, spec.m_max);
    }
    spec.validate();

    BrownianField out;
    out.spec_ = spec;
    out.seed_ = 0;
    const int L = spec.lines();
    const int U = spec.units();
    const int G = spec.grid;
    out.lines_.assign(L, std::vector<double>(spec.width(), 0.0));
    for (auto& vals : out.lines_) {
        is.read(reinterpret_cast<char*>(vals.data()),
                static_cast<std::streamsize>(vals.size() * sizeof(double)));
        require(static_cast<size_t>(is.gcount()) == vals.size() * sizeof(double),
                "snapshot truncated");
    }
    // the stored line values are canonical; increments are derived for block
    // bookkeeping and future resamples
    out.blocks_.assign(L, std::vector<std::vector<double>>(U));
    for (int ls = 0; ls < L; ++ls) {
        for (int us = 0; us < U; ++us) {
            auto& b = out.blocks_[ls][us];
            b.resize(G);
            for (int k = 0; k < G; ++k)
                b[k] = out.lines_[ls][us * G + k + 1] - out.lines_[ls][us * G + k];
        }
    }
    return out;
}

double BrownianField::max_block_rebuild_deviation() const {
    double worst = 0.0;
    const int G = spec_.grid;
    for (int ls = 0; ls < spec_.lines(); ++ls) {
        double acc = lines_[ls][0];
        for (int us = 0; us < spec_.units(); ++us) {
            for (int k = 0; k < G; ++k) {
                acc += blocks_[ls][us][k];
                const double stored = lines_[ls][us * G + k + 1];
                worst = std::max(worst,
                                 std::abs(stored - acc) / (1.0 + std::abs(stored)));
            }
            acc = lines_[ls][(us + 1) * G];  // re-anchor like the rebuild does
        }
    }
    return worst;
}

// bit-level comparison of the cumulative line values (the canonical state)
bool BrownianField::bitwise_equal(const BrownianField& other) const {
    if (!(spec_ == other.spec_)) return false;
    for (size_t ls = 0; ls < lines_.size(); ++ls) {
        if (std::memcmp(lines_[ls].data(), other.lines_[ls].data(),
                        lines_[ls].size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

BrownianField sample_field(const GridSpec& spec, uint64_t seed) {
    return BrownianField(spec, seed);
}

}  // namespace blpp
