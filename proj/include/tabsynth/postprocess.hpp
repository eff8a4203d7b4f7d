#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabsynth {

enum class RewriteForm { assign, indexed_assign, print, bare_expr, none };

std::string_view to_string(RewriteForm f);

struct Completion {
  std::string raw;
  std::string cleaned;
  std::optional<std::string> program;  // present iff form != none
  RewriteForm form = RewriteForm::none;
  std::string output_var;
};

// Decodes HTML entities (&lt; &gt; &amp; &quot; &#39;) to a fixpoint, drops
// blank and comment-only lines, strips trailing whitespace, and cuts the text
// at the first column-0 '#' line that follows executable code. Lines inside
// triple-quoted strings are left alone. Idempotent.
std::string cleanup(std::string_view raw);

// Finds the last top-level statement of a recognised form, scanning
// backwards, and exposes its value as a fresh output variable:
//   var = expr          -> append `<out> = var`
//   var[expr_i] = expr  -> append `<out> = var`
//   print(expr, ...)    -> replace it and the rest with `<out> = expr`
//   expr                -> replace it and the rest with `<out> = expr`
// The program is the missing common imports, then `input_preamble`, then the
// rewritten code.
Completion rewrite(std::string_view cleaned, std::string_view input_preamble);

// cleanup + rewrite, keeping the raw text.
Completion process_completion(std::string_view raw, std::string_view input_preamble);

// Import lines prepended when a program lacks them.
const std::vector<std::string>& common_imports();

}  // namespace tabsynth
