#include "rsq/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rsq {

namespace {

constexpr double kVonNeumannBranch = 1e-9;

[[noreturn]] void throw_overflow(double n, double q, int d) {
    std::ostringstream os;
    os << "tsallis_singlet_entropy: D^{n(1-q)} overflows (n=" << n << ", q=" << q << ", D=" << d
       << "); narrow the q or L range";
    throw std::overflow_error(os.str());
}

std::string format_g12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace

double tsallis_singlet_entropy(double n, double q, int two_s) {
    if (two_s < 1) throw std::invalid_argument("tsallis_singlet_entropy: two_s must be >= 1");
    if (!(n >= 0.0) || !std::isfinite(n))
        throw std::invalid_argument("tsallis_singlet_entropy: n must be finite and >= 0");
    if (!std::isfinite(q)) throw std::invalid_argument("tsallis_singlet_entropy: q must be finite");
    const int d = two_s + 1;
    const double log_d = std::log(static_cast<double>(d));
    const double one_minus_q = 1.0 - q;
    if (std::abs(one_minus_q) < kVonNeumannBranch) return n * log_d; // von Neumann limit
    const double x = n * one_minus_q * log_d;
    if (x > kMaxExpArgument) throw_overflow(n, q, d);
    return std::expm1(x) / one_minus_q;
}

double tsallis_singlet_entropy(long n, double q, int two_s) {
    if (n < 0) throw std::invalid_argument("tsallis_singlet_entropy: n must be >= 0");
    return tsallis_singlet_entropy(static_cast<double>(n), q, two_s);
}

const EntropyTable::Cell& EntropyTable::at(std::size_t qi, std::size_t li) const {
    return cells.at(qi * block_sizes.size() + li);
}

void EntropyAccumulator::Cell::push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void EntropyAccumulator::Cell::merge(const Cell& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double nt = na + nb;
    const double delta = other.mean - mean;
    mean = (na * mean + nb * other.mean) / nt;
    m2 += other.m2 + delta * delta * (na * nb / nt);
    count += other.count;
}

EntropyAccumulator::EntropyAccumulator(std::vector<double> q_values,
                                       std::vector<std::uint32_t> block_sizes, int two_s)
    : q_(std::move(q_values)), sizes_(std::move(block_sizes)), two_s_(two_s) {
    if (two_s_ < 1) throw std::invalid_argument("EntropyAccumulator: two_s must be >= 1");
    if (q_.empty() || sizes_.empty())
        throw std::invalid_argument("EntropyAccumulator: q grid and block ladder must be nonempty");
    log_d_ = std::log(static_cast<double>(two_s_ + 1));
    exp_coeff_.resize(q_.size());
    inv_one_mq_.resize(q_.size());
    von_neumann_.resize(q_.size());
    for (std::size_t qi = 0; qi < q_.size(); ++qi) {
        const double one_minus_q = 1.0 - q_[qi];
        von_neumann_[qi] = std::abs(one_minus_q) < kVonNeumannBranch;
        exp_coeff_[qi] = one_minus_q * log_d_;
        inv_one_mq_[qi] = von_neumann_[qi] ? 0.0 : 1.0 / one_minus_q;
    }
    cells_.resize(q_.size() * sizes_.size());
}

void EntropyAccumulator::add(const CrossingTable& counts) {
    if (counts.sizes != sizes_)
        throw std::invalid_argument("EntropyAccumulator: crossing table ladder does not match");
    for (std::size_t qi = 0; qi < q_.size(); ++qi) {
        Cell* row = cells_.data() + qi * sizes_.size();
        for (std::size_t li = 0; li < sizes_.size(); ++li) {
            const double n = counts.counts[li];
            double s;
            if (von_neumann_[qi]) {
                s = n * log_d_;
            } else {
                const double x = n * exp_coeff_[qi];
                if (x > kMaxExpArgument) {
                    std::ostringstream os;
                    os << "entropy accumulation overflow at q=" << q_[qi] << ", L=" << sizes_[li]
                       << ", n=" << n << "; narrow the q or L range";
                    throw std::overflow_error(os.str());
                }
                s = std::expm1(x) * inv_one_mq_[qi];
            }
            row[li].push(s);
        }
    }
}

void EntropyAccumulator::merge(const EntropyAccumulator& other) {
    if (other.q_ != q_ || other.sizes_ != sizes_ || other.two_s_ != two_s_)
        throw std::invalid_argument("EntropyAccumulator: merge of incompatible tables");
    for (std::size_t i = 0; i < cells_.size(); ++i)
        cells_[i].merge(other.cells_[i]);
}

std::uint64_t EntropyAccumulator::configurations() const {
    return cells_.empty() ? 0 : cells_.front().count;
}

EntropyTable EntropyAccumulator::table() const {
    EntropyTable t;
    t.q_values = q_;
    t.block_sizes = sizes_;
    t.cells.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Cell& c = cells_[i];
        t.cells[i].mean = c.mean;
        t.cells[i].samples = c.count;
        t.cells[i].stderr_mean =
            c.count > 1 ? std::sqrt(c.m2 / (static_cast<double>(c.count - 1) * static_cast<double>(c.count)))
                        : 0.0;
    }
    return t;
}

void EntropyAccumulator::restore_cells(const std::vector<Cell>& cells) {
    if (cells.size() != cells_.size())
        throw std::invalid_argument("EntropyAccumulator: restored cell count does not match");
    cells_ = cells;
}

void write_entropy_csv(std::ostream& os, const EntropyTable& table) {
    os << "q,L,mean,stderr,M\n";
    for (std::size_t qi = 0; qi < table.q_values.size(); ++qi) {
        for (std::size_t li = 0; li < table.block_sizes.size(); ++li) {
            const auto& cell = table.at(qi, li);
            os << format_g12(table.q_values[qi]) << ',' << table.block_sizes[li] << ','
               << format_g12(cell.mean) << ',' << format_g12(cell.stderr_mean) << ',' << cell.samples
               << '\n';
        }
    }
}

EntropyTable read_entropy_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("entropy csv: empty file");
    if (line != "q,L,mean,stderr,M")
        throw std::runtime_error("entropy csv: unexpected header '" + line + "'");

    struct Row {
        double q;
        std::uint32_t L;
        EntropyTable::Cell cell;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        Row r;
        char* end = nullptr;
        const char* p = line.c_str();
        r.q = std::strtod(p, &end);
        if (end == p || *end != ',') throw std::runtime_error("entropy csv: bad row " + std::to_string(line_no));
        p = end + 1;
        r.L = static_cast<std::uint32_t>(std::strtoul(p, &end, 10));
        if (end == p || *end != ',') throw std::runtime_error("entropy csv: bad row " + std::to_string(line_no));
        p = end + 1;
        r.cell.mean = std::strtod(p, &end);
        if (end == p || *end != ',') throw std::runtime_error("entropy csv: bad row " + std::to_string(line_no));
        p = end + 1;
        r.cell.stderr_mean = std::strtod(p, &end);
        if (end == p || *end != ',') throw std::runtime_error("entropy csv: bad row " + std::to_string(line_no));
        p = end + 1;
        r.cell.samples = std::strtoull(p, &end, 10);
        if (end == p) throw std::runtime_error("entropy csv: bad row " + std::to_string(line_no));
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("entropy csv: no data rows");

    EntropyTable t;
    for (const Row& r : rows) {
        bool have_q = false;
        for (double q : t.q_values) have_q |= q == r.q;
        if (!have_q) t.q_values.push_back(r.q);
        bool have_l = false;
        for (std::uint32_t L : t.block_sizes) have_l |= L == r.L;
        if (!have_l) t.block_sizes.push_back(r.L);
    }
    t.cells.resize(t.q_values.size() * t.block_sizes.size());
    std::vector<char> seen(t.cells.size(), 0);
    for (const Row& r : rows) {
        std::size_t qi = 0, li = 0;
        while (t.q_values[qi] != r.q) ++qi;
        while (t.block_sizes[li] != r.L) ++li;
        const std::size_t idx = qi * t.block_sizes.size() + li;
        if (seen[idx]) throw std::runtime_error("entropy csv: duplicate (q, L) row");
        seen[idx] = 1;
        t.cells[idx] = r.cell;
    }
    for (char s : seen)
        if (!s) throw std::runtime_error("entropy csv: missing (q, L) cells; grid is not complete");
    return t;
}

} // namespace rsq
