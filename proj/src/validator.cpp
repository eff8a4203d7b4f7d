#include "tabsynth/validator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace tabsynth {

void MatchOptions::validate() const {
  if (!(relative_error > 0.0)) throw InvalidArgument("relative_error must be positive");
}

bool is_valid(const ExecOutput& output, const Table& input) {
  return output.status == ExecStatus::ok && output.value &&
         output.value->row_count() == input.row_count() && output.value->column_count() >= 1;
}

namespace {

using boost::multiprecision::cpp_int;

// mantissa * 10^exponent
struct Decimal {
  cpp_int mantissa;
  long exponent = 0;
};

constexpr long max_exponent = 4000;

std::string_view strip(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Parses the numeric grammar; returns nullopt for anything else.
std::optional<Decimal> parse_decimal(std::string_view text) {
  std::string_view s = strip(text);
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::string digits;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < s.size() && is_digit(s[i])) {
    digits.push_back(s[i++]);
    ++int_digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) {
      digits.push_back(s[i++]);
      ++frac_digits;
    }
  }
  if (int_digits + frac_digits == 0) return std::nullopt;
  long exp = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) exp_negative = s[i++] == '-';
    std::size_t start = i;
    while (i < s.size() && is_digit(s[i])) {
      if (exp < 1'000'000) exp = exp * 10 + (s[i] - '0');
      ++i;
    }
    if (i == start) return std::nullopt;
    if (exp_negative) exp = -exp;
  }
  if (i != s.size()) return std::nullopt;

  Decimal d;
  auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return d;  // zero
  d.mantissa = cpp_int(digits.substr(first));
  if (negative) d.mantissa = -d.mantissa;
  d.exponent = exp - static_cast<long>(frac_digits);
  return d;
}

cpp_int pow10(long n) {
  cpp_int r = 1;
  cpp_int base = 10;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

// Rescales both to the smaller exponent. False if that would be absurdly large.
bool align(const Decimal& a, const Decimal& b, cpp_int& ma, cpp_int& mb) {
  long lo = std::min(a.exponent, b.exponent);
  long da = a.exponent - lo, db = b.exponent - lo;
  if (da > max_exponent || db > max_exponent) return false;
  ma = a.mantissa * pow10(da);
  mb = b.mantissa * pow10(db);
  return true;
}

Decimal decimal_of(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return *parse_decimal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

double to_double(std::string_view s) {
  std::string t(strip(s));
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double v = 0;
  std::from_chars(t.data(), t.data() + t.size(), v);
  return v;
}

bool numbers_close(std::string_view expected, std::string_view actual, double rel) {
  auto e = parse_decimal(expected);
  auto a = parse_decimal(actual);
  if (!e || !a) return false;

  static const Decimal floor{1, -9};
  Decimal mag = *e;
  mag.mantissa = abs(mag.mantissa);
  cpp_int m1, m2;
  if (!align(mag, floor, m1, m2)) {
    // Magnitudes too far apart for exact arithmetic; fall back to doubles.
    double ev = to_double(expected), av = to_double(actual);
    return std::abs(av - ev) < rel * std::max(std::abs(ev), 1e-9);
  }
  if (m1 < m2) mag = floor;

  cpp_int diff_a, diff_e;
  if (!align(*a, *e, diff_a, diff_e)) {
    double ev = to_double(expected), av = to_double(actual);
    return std::abs(av - ev) < rel * std::max(std::abs(ev), 1e-9);
  }
  Decimal diff{abs(diff_a - diff_e), std::min(a->exponent, e->exponent)};

  Decimal r = decimal_of(rel);
  Decimal tol{r.mantissa * mag.mantissa, r.exponent + mag.exponent};
  cpp_int lhs, rhs;
  if (!align(diff, tol, lhs, rhs)) {
    double ev = to_double(expected), av = to_double(actual);
    return std::abs(av - ev) < rel * std::max(std::abs(ev), 1e-9);
  }
  return lhs < rhs;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<bool> truth_value(std::string_view s, const MatchOptions& opts) {
  std::string key = lower(strip(s));
  if (opts.true_strings.count(key)) return true;
  if (opts.false_strings.count(key)) return false;
  return std::nullopt;
}

std::optional<bool> actual_truth(std::string_view s, const MatchOptions& opts) {
  if (auto d = parse_decimal(s)) {
    if (d->mantissa == 0) return false;
    cpp_int one_m, d_m;
    if (align(Decimal{1, 0}, *d, one_m, d_m) && one_m == d_m) return true;
  }
  return truth_value(s, opts);
}

}  // namespace

bool looks_numeric(std::string_view s) { return parse_decimal(s).has_value(); }

bool cells_match(std::string_view expected, std::string_view actual, const MatchOptions& opts) {
  if (expected == actual) return true;
  if (!opts.case_sensitive && lower(expected) == lower(actual)) return true;
  if (numbers_close(expected, actual, opts.relative_error)) return true;
  if (auto want = truth_value(expected, opts)) {
    if (auto got = actual_truth(actual, opts); got && *got == *want) return true;
  }
  return false;
}

MatchResult outputs_match(const Table& expected, const Table& actual, const MatchOptions& opts) {
  if (expected.row_count() != actual.row_count()) {
    throw InvalidArgument("row count mismatch: expected " + std::to_string(expected.row_count()) +
                          ", actual " + std::to_string(actual.row_count()));
  }
  const std::size_t ne = expected.column_count(), na = actual.column_count();
  const std::size_t rows = expected.row_count();

  // score[i][j] = matching rows of expected column i against actual column j
  std::vector<std::vector<std::size_t>> score(ne, std::vector<std::size_t>(na, 0));
  std::vector<std::vector<std::optional<std::size_t>>> first_bad(
      ne, std::vector<std::optional<std::size_t>>(na));
  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      for (std::size_t r = 0; r < rows; ++r) {
        if (cells_match(expected.cell(i, r), actual.cell(j, r), opts)) {
          ++score[i][j];
        } else if (!first_bad[i][j]) {
          first_bad[i][j] = r;
        }
      }
    }
  }

  std::vector<std::vector<std::size_t>> candidates(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      if (!first_bad[i][j]) candidates[i].push_back(j);
    }
    std::stable_sort(candidates[i].begin(), candidates[i].end(),
                     [&](std::size_t a, std::size_t b) { return score[i][a] > score[i][b]; });
  }

  MatchResult result;
  for (std::size_t i = 0; i < ne; ++i) {
    if (!candidates[i].empty()) continue;
    if (na == 0) {
      result.first_mismatch = CellMismatch{expected.column(i).name, 0,
                                           rows ? expected.cell(i, 0) : "", ""};
      return result;
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < na; ++j) {
      if (score[i][j] > score[i][best]) best = j;
    }
    std::size_t r = *first_bad[i][best];
    result.first_mismatch =
        CellMismatch{expected.column(i).name, r, expected.cell(i, r), actual.cell(best, r)};
    return result;
  }

  // Most constrained expected columns first.
  std::vector<std::size_t> order(ne);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].size() < candidates[b].size();
  });

  std::vector<std::size_t> assigned(ne, na);
  std::vector<bool> used(na, false);
  auto search = [&](auto& self, std::size_t pos) -> bool {
    if (pos == ne) return true;
    std::size_t i = order[pos];
    for (std::size_t j : candidates[i]) {
      if (used[j]) continue;
      used[j] = true;
      assigned[i] = j;
      if (self(self, pos + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  if (!search(search, 0)) return result;

  result.matched = true;
  std::map<std::string, std::string> mapping;
  for (std::size_t i = 0; i < ne; ++i) {
    mapping.emplace(expected.column(i).name, actual.column(assigned[i]).name);
  }
  result.column_mapping = std::move(mapping);
  return result;
}

}  // namespace tabsynth
