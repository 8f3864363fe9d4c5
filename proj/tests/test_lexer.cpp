#include "tfsmell/hcl/lexer.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace tfsmell::hcl;
namespace fs = std::filesystem;

namespace {

std::vector<Token> significant(std::string_view text) {
  std::vector<Token> out;
  for (auto& t : tokenize(text)) {
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Eof) out.push_back(t);
  }
  return out;
}

std::vector<TokenKind> kinds(std::string_view text) {
  std::vector<TokenKind> out;
  for (const auto& t : significant(text)) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST(Lexer, RoundTripsEveryFixture) {
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(tfsmell::testing::fixtures())) {
    if (entry.path().extension() != ".tf") continue;
    auto text = tfsmell::testing::read_file(entry.path());
    EXPECT_EQ(detokenize(tokenize(text)), text) << entry.path();
    ++files;
  }
  EXPECT_GT(files, 20u);
}

TEST(Lexer, RoundTripsMalformedInput) {
  for (std::string_view text : {"a = \"unterminated\nb = 1\n", "x = <<EOF\nnever closed\n", "/* open comment",
                                "weird = @\n", "\xEF\xBB\xBF\r\n\r\n", "", "  \t ", "a=\"${\"", "\r"}) {
    EXPECT_EQ(detokenize(tokenize(text)), text);
  }
}

TEST(Lexer, RoundTripsRandomBytes) {
  std::mt19937 gen(7);
  const std::string alphabet = "ab1 =\"{}[]#/*\n\r$%<-EOF.,\\\t\xC3\xA9";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    std::size_t len = gen() % 60;
    for (std::size_t i = 0; i < len; ++i) text += alphabet[gen() % alphabet.size()];
    ASSERT_EQ(detokenize(tokenize(text)), text);
  }
}

TEST(Lexer, EndsWithEof) {
  auto tokens = tokenize("a = 1");
  ASSERT_FALSE(tokens.empty());
  EXPECT_EQ(tokens.back().kind, TokenKind::Eof);
  EXPECT_EQ(tokenize("").size(), 1u);
}

TEST(Lexer, ClassifiesTokens) {
  EXPECT_EQ(kinds("resource \"t\" \"n\" {\n}"),
            (std::vector{TokenKind::Identifier, TokenKind::String, TokenKind::String, TokenKind::BlockOpen,
                         TokenKind::BlockClose}));
  EXPECT_EQ(kinds("x = true"), (std::vector{TokenKind::Identifier, TokenKind::Assign, TokenKind::Bool}));
  EXPECT_EQ(kinds("n = 1.5e3"), (std::vector{TokenKind::Identifier, TokenKind::Assign, TokenKind::Number}));
  EXPECT_EQ(kinds("a == b"), (std::vector{TokenKind::Identifier, TokenKind::Punctuation, TokenKind::Identifier}));
  EXPECT_EQ(kinds("k => v"), (std::vector{TokenKind::Identifier, TokenKind::Punctuation, TokenKind::Identifier}));
}

TEST(Lexer, MultiCharOperatorsAreSingleTokens) {
  auto toks = significant("a... && b || c != d <= e >= f");
  std::vector<std::string> ops;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::Punctuation) ops.push_back(t.text);
  }
  EXPECT_EQ(ops, (std::vector<std::string>{"...", "&&", "||", "!=", "<=", ">="}));
}

TEST(Lexer, CommentStyles) {
  auto toks = significant("# hash\n// slashes\n/* block\n spanning */ x = 1");
  ASSERT_GE(toks.size(), 3u);
  EXPECT_EQ(toks[0].kind, TokenKind::Comment);
  EXPECT_EQ(toks[0].text, "# hash");
  EXPECT_EQ(toks[1].text, "// slashes");
  EXPECT_EQ(toks[2].text, "/* block\n spanning */");
  EXPECT_EQ(toks[2].span.end_line, 4u);
}

TEST(Lexer, LineCommentStopsBeforeCarriageReturn) {
  auto toks = tokenize("# note\r\nx = 1");
  EXPECT_EQ(toks[0].text, "# note");
  EXPECT_EQ(toks[1].kind, TokenKind::Newline);
  EXPECT_EQ(toks[1].text, "\r\n");
}

TEST(Lexer, CrLfIsOneNewline) {
  auto toks = tokenize("a = 1\r\nb = 2\r\n");
  std::size_t newlines = 0;
  for (const auto& t : toks) newlines += t.kind == TokenKind::Newline;
  EXPECT_EQ(newlines, 2u);
  auto b = significant("a = 1\r\nb = 2\r\n")[3];
  EXPECT_EQ(b.text, "b");
  EXPECT_EQ(b.span.start_line, 2u);
  EXPECT_EQ(b.span.start_col, 1u);
}

TEST(Lexer, ColumnsCountCodePoints) {
  auto toks = significant("s = \"caf\xC3\xA9\" t");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[2].span.start_col, 5u);
  EXPECT_EQ(toks[2].span.end_col, 11u);  // 6 code points, end exclusive
  EXPECT_EQ(toks[3].span.start_col, 12u);
  EXPECT_EQ(toks[3].span.begin, 12u);  // bytes keep counting bytes
}

TEST(Lexer, ByteOrderMarkIsTrivia) {
  auto toks = tokenize("\xEF\xBB\xBFx = 1");
  EXPECT_EQ(toks[0].kind, TokenKind::Identifier);
  EXPECT_EQ(toks[0].leading, "\xEF\xBB\xBF");
  EXPECT_EQ(toks[0].span.start_col, 1u);
  EXPECT_EQ(toks[0].span.begin, 3u);
}

TEST(Lexer, StringsWithNestedTemplates) {
  auto toks = significant(R"(v = "a ${f("x", "${y}")} b" w)");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[2].kind, TokenKind::String);
  EXPECT_EQ(toks[2].text, R"("a ${f("x", "${y}")} b")");
  EXPECT_EQ(toks[3].text, "w");
}

TEST(Lexer, TemplateEscapesDoNotOpenInterpolation) {
  auto toks = significant(R"(v = "$${literal" w)");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[2].text, R"("$${literal")");
}

TEST(Lexer, UnterminatedStringIsErrorToEndOfLine) {
  auto toks = tokenize("a = \"open\nb = 2\n");
  auto it = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.kind == TokenKind::Error; });
  ASSERT_NE(it, toks.end());
  EXPECT_EQ(it->text, "\"open");
  EXPECT_FALSE(it->error.empty());
  auto b = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.text == "b"; });
  ASSERT_NE(b, toks.end());
  EXPECT_EQ(b->span.start_line, 2u);
}

TEST(Lexer, Heredocs) {
  auto toks = significant("p = <<EOT\nline one\n  EOT\nq = 1");
  ASSERT_GE(toks.size(), 4u);
  EXPECT_EQ(toks[2].kind, TokenKind::Heredoc);
  EXPECT_EQ(toks[2].text, "<<EOT\nline one\n  EOT");
  EXPECT_EQ(toks[3].text, "q");
  EXPECT_EQ(toks[3].span.start_line, 4u);

  auto indented = significant("p = <<-EOT\n    x\n    EOT\n");
  EXPECT_EQ(indented[2].kind, TokenKind::Heredoc);

  auto open = tokenize("p = <<EOT\nnever\n");
  EXPECT_TRUE(std::any_of(open.begin(), open.end(), [](const Token& t) { return t.kind == TokenKind::Error; }));
}

TEST(Lexer, MarkerMustBeWholeLine) {
  auto toks = significant("p = <<EOT\nEOTX\nEOT\n");
  EXPECT_EQ(toks[2].text, "<<EOT\nEOTX\nEOT");
}

TEST(Lexer, StrayCharacterIsErrorAndLexingContinues) {
  auto toks = significant("a = @ b");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[2].kind, TokenKind::Error);
  EXPECT_EQ(toks[3].text, "b");
}

TEST(Lexer, SpansAreContiguousWithLeading) {
  auto text = std::string("resource \"a\" \"b\" {\n  x = [1, 2] # c\n}\n");
  std::size_t pos = 0;
  for (const auto& t : tokenize(text)) {
    pos += t.leading.size();
    EXPECT_EQ(t.span.begin, pos);
    pos += t.text.size();
    EXPECT_EQ(t.span.end, pos);
  }
  EXPECT_EQ(pos, text.size());
}

TEST(Lexer, CoverJoinsSpans) {
  auto toks = significant("a = 1");
  auto s = cover(toks[0].span, toks[2].span);
  EXPECT_EQ(s.begin, 0u);
  EXPECT_EQ(s.end, 5u);
  EXPECT_EQ(s.start_col, 1u);
  EXPECT_EQ(s.end_col, 6u);
  EXPECT_TRUE(s.contains(toks[1].span));
}
