#include <string>

#include "citywalk/syntax.hpp"
#include "doctest.h"

using namespace citywalk;
using namespace citywalk::syntax;

namespace {

const char* kConvertSource = R"cpp(
#include <string>
#include <sstream>
#include <gtest/gtest.h>
#include "convert.h"
#include "node.h"

namespace YAML {

// Converts scalar nodes to native values.
class convert {
 public:
  static bool decode(const Node& node, std::string& rhs) {
    if (!node.IsScalar())
      return false;
    rhs = node.Scalar();
    return true;
  }

  static Node encode(const std::string& rhs);

 private:
  int cache_size_ = 0;
  std::string last_error_;
};

Node convert::encode(const std::string& rhs) {
  Node node;
  node.SetScalar(rhs);
  return node;
}

}  // namespace YAML
)cpp";

}  // namespace

TEST_CASE("lexer classifies tokens and skips comments/strings") {
    std::string src = "int x = 3; // trailing\n/* block */ const char* s = \"a)b{\";";
    auto toks = lex(src);
    int comments = 0, strings = 0;
    for (auto& t : toks) {
        if (t.kind == TokenKind::Comment) ++comments;
        if (t.kind == TokenKind::String) ++strings;
    }
    CHECK(comments == 2);
    CHECK(strings == 1);
}

TEST_CASE("includes are collected with form and target") {
    FileSyntax fsx = default_backend().parse(kConvertSource);
    REQUIRE(fsx.includes.size() == 5);
    CHECK(fsx.includes[0].raw == "#include <string>");
    CHECK(fsx.includes[0].angled);
    CHECK(fsx.includes[3].raw == "#include \"convert.h\"");
    CHECK_FALSE(fsx.includes[3].angled);
    CHECK(fsx.includes[2].target == "gtest/gtest.h");
}

TEST_CASE("namespace, class, methods and fields are extracted") {
    FileSyntax fsx = default_backend().parse(kConvertSource);
    REQUIRE(fsx.namespaces.size() == 1);
    CHECK(fsx.namespaces[0].text == "namespace YAML");

    REQUIRE(fsx.records.size() == 1);
    CHECK(fsx.records[0].name == "convert");
    REQUIRE(fsx.records[0].field_decls.size() == 2);
    CHECK(fsx.records[0].field_decls[0] == "int cache_size_ = 0;");

    // decode (inline definition), encode declaration, encode out-of-line definition.
    REQUIRE(fsx.functions.size() == 3);
    const FunctionInfo& decode = fsx.functions[0];
    CHECK(decode.name == "decode");
    CHECK(decode.class_name == "convert");
    CHECK(decode.is_definition);
    REQUIRE(decode.param_types.size() == 2);
    CHECK(decode.param_types[0] == "const Node&");
    CHECK(decode.param_types[1] == "std::string&");
    CHECK(decode.namespaces == std::vector<std::string>{"YAML"});

    const FunctionInfo& encode_decl = fsx.functions[1];
    CHECK(encode_decl.name == "encode");
    CHECK_FALSE(encode_decl.is_definition);

    const FunctionInfo& encode_def = fsx.functions[2];
    CHECK(encode_def.name == "encode");
    CHECK(encode_def.class_name == "convert");
    CHECK(encode_def.is_definition);
}

TEST_CASE("free functions, constructors and operators") {
    std::string src = R"cpp(
struct Point {
  Point(int x, int y) : x_(x), y_(y) {}
  bool operator==(const Point& o) const { return x_ == o.x_; }
  int x_;
  int y_;
};

int add(int a, int b) {
  return a + b;
}

static std::vector<int> make() { return {}; }
)cpp";
    FileSyntax fsx = default_backend().parse(src);
    REQUIRE(fsx.functions.size() == 4);
    CHECK(fsx.functions[0].name == "Point");
    CHECK(fsx.functions[0].class_name == "Point");
    CHECK(fsx.functions[0].is_definition);
    CHECK(fsx.functions[1].name == "operator==");
    CHECK(fsx.functions[2].name == "add");
    CHECK(fsx.functions[2].class_name.empty());
    CHECK(fsx.functions[2].param_types == std::vector<std::string>{"int", "int"});
    CHECK(fsx.functions[3].name == "make");
    CHECK(fsx.records[0].field_decls.size() == 2);
}

TEST_CASE("declaration-only files yield no definitions") {
    std::string src = "int parse(const char* s);\nvoid reset();\n";
    FileSyntax fsx = default_backend().parse(src);
    for (auto& fn : fsx.functions) CHECK_FALSE(fn.is_definition);
    CHECK(fsx.functions.size() == 2);
}

TEST_CASE("standalone comment blocks are grouped") {
    std::string src = "// line one\n// line two\nint x = 1;  // trailing\n\n/* lone\n   block */\nint y;\n";
    FileSyntax fsx = default_backend().parse(src);
    REQUIRE(fsx.comments.size() == 2);
    CHECK(fsx.comments[0].text == "// line one\n// line two");
    CHECK(fsx.comments[1].first_line == 5);
}

TEST_CASE("parameter type parsing strips names and defaults") {
    CHECK(parse_parameter_types("double") == std::vector<std::string>{"double"});
    CHECK(parse_parameter_types("double value") == std::vector<std::string>{"double"});
    CHECK(parse_parameter_types("const std::string& name, int count = 3") ==
          std::vector<std::string>{"const std::string&", "int"});
    CHECK(parse_parameter_types("std::map<int, std::string> m") ==
          std::vector<std::string>{"std::map<int, std::string>"});
    CHECK(parse_parameter_types("void").empty());
    CHECK(parse_parameter_types("").empty());
}
