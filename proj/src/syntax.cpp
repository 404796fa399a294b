/*
 *  This program is free software; you can redistribute it and/or
 *  modify it under the terms of the Apache License, Version 2.0.
 *
 *  Copyright:
 *     2026, The cgchr authors
 *
 *     Licensed under the Apache License, Version 2.0 (the "License");
 *     you may not use this file except in compliance with the License.
 *     You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *     Unless required by applicable law or agreed to in writing, software
 *     distributed under the License is distributed on an "AS IS" BASIS,
 *     WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *     See the License for the specific language governing permissions and
 *     limitations under the License.
 *
 */

#include <chr/syntax.hh>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace chr
{
	ParseError::ParseError(const std::string& msg, int line, int column)
		: std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
		  _line(line), _column(column)
	{ }

	const Chr& Rule::head(std::size_t k) const
	{
		return k < propagated.size() ? propagated[k] : simplified[k - propagated.size()];
	}

	const Rule* Program::find_rule(std::string_view name) const
	{
		for (const auto& r : rules)
			if (r.name == name) return &r;
		return nullptr;
	}

	std::size_t Program::rule_index(std::string_view name) const
	{
		for (std::size_t i = 0; i < rules.size(); ++i)
			if (rules[i].name == name) return i;
		return rules.size();
	}

	const std::vector< Occurrence >& Program::occurrences_of(const std::string& pred) const
	{
		static const std::vector< Occurrence > none;
		auto it = occurrences.find(pred);
		return it == occurrences.end() ? none : it->second;
	}

	namespace
	{
		enum class Tok
		{
			Upper, Lower, Int, Atom, True, False,
			At, Backslash, Simp, Prop, Bar, Comma, Dot, LParen, RParen, Equals,
			Plus, Minus, Star, Gt, Ge, Lt, Le, EqEq, Ne, AndAnd, OrOr,
			End
		};

		struct Token
		{
			Tok kind;
			std::string text;
			int line;
			int column;
		};

		std::vector< Token > tokenize(std::string_view src)
		{
			std::vector< Token > out;
			int line = 1, col = 1;
			std::size_t i = 0;
			auto advance = [&](std::size_t n) {
				for (std::size_t k = 0; k < n; ++k, ++i)
				{
					if (src[i] == '\n') { ++line; col = 1; }
					else ++col;
				}
			};
			static const std::pair< const char*, Tok > symbols[] = {
				{"<=>", Tok::Simp}, {"==>", Tok::Prop},
				{">=", Tok::Ge}, {"<=", Tok::Le}, {"==", Tok::EqEq}, {"!=", Tok::Ne},
				{"&&", Tok::AndAnd}, {"||", Tok::OrOr},
				{"@", Tok::At}, {"\\", Tok::Backslash}, {"|", Tok::Bar}, {",", Tok::Comma},
				{".", Tok::Dot}, {"(", Tok::LParen}, {")", Tok::RParen}, {"=", Tok::Equals},
				{"+", Tok::Plus}, {"-", Tok::Minus}, {"*", Tok::Star}, {">", Tok::Gt}, {"<", Tok::Lt},
			};
			while (i < src.size())
			{
				char c = src[i];
				if (std::isspace(static_cast< unsigned char >(c))) { advance(1); continue; }
				if (c == '%')
				{
					while (i < src.size() && src[i] != '\n') advance(1);
					continue;
				}
				int tl = line, tc = col;
				if (std::isalpha(static_cast< unsigned char >(c)) || c == '_')
				{
					std::size_t j = i;
					while (j < src.size() && (std::isalnum(static_cast< unsigned char >(src[j])) || src[j] == '_')) ++j;
					std::string word(src.substr(i, j - i));
					Tok k = std::isupper(static_cast< unsigned char >(c)) ? Tok::Upper : Tok::Lower;
					if (word == "true") k = Tok::True;
					else if (word == "false") k = Tok::False;
					out.push_back({k, word, tl, tc});
					advance(j - i);
					continue;
				}
				if (std::isdigit(static_cast< unsigned char >(c)))
				{
					std::size_t j = i;
					while (j < src.size() && std::isdigit(static_cast< unsigned char >(src[j]))) ++j;
					out.push_back({Tok::Int, std::string(src.substr(i, j - i)), tl, tc});
					advance(j - i);
					continue;
				}
				if (c == '\'')
				{
					std::size_t j = i + 1;
					while (j < src.size() && (std::isalnum(static_cast< unsigned char >(src[j])) || src[j] == '_')) ++j;
					if (j >= src.size() || src[j] != '\'' || j == i + 1)
						throw ParseError("bad atom, expected 'name' with letters, digits or _", tl, tc);
					out.push_back({Tok::Atom, std::string(src.substr(i + 1, j - i - 1)), tl, tc});
					advance(j + 1 - i);
					continue;
				}
				bool matched = false;
				for (const auto& [sym, kind] : symbols)
				{
					std::string_view s(sym);
					if (src.substr(i, s.size()) == s)
					{
						out.push_back({kind, std::string(s), tl, tc});
						advance(s.size());
						matched = true;
						break;
					}
				}
				if (!matched)
					throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
			}
			out.push_back({Tok::End, "", line, col});
			return out;
		}

		class Parser
		{
		public:
			explicit Parser(std::string_view src) : _toks(tokenize(src)) { }

			Program program()
			{
				Program p;
				while (!at(Tok::End))
				{
					Rule r = rule(static_cast< std::uint32_t >(p.rules.size() + 1));
					p.rules.push_back(std::move(r));
				}
				return p;
			}

			std::vector< Constraint > goals()
			{
				std::vector< Constraint > gs;
				if (at(Tok::End)) return gs;
				do
				{
					gs.push_back(body_item(0));
				} while (accept(Tok::Comma));
				accept(Tok::Dot);
				expect(Tok::End, "end of goals");
				return gs;
			}

			Term lone_term(std::uint32_t scope)
			{
				Term t = expr(scope);
				expect(Tok::End, "end of term");
				return t;
			}

			Constraint lone_constraint(std::uint32_t scope)
			{
				Constraint c = body_item(scope);
				expect(Tok::End, "end of constraint");
				return c;
			}

		private:
			const Token& peek(std::size_t ahead = 0) const
			{
				std::size_t k = std::min(_pos + ahead, _toks.size() - 1);
				return _toks[k];
			}
			bool at(Tok k) const { return peek().kind == k; }
			bool accept(Tok k)
			{
				if (!at(k)) return false;
				++_pos;
				return true;
			}
			const Token& expect(Tok k, const char* what)
			{
				if (!at(k))
				{
					const Token& t = peek();
					throw ParseError(std::string("expected ") + what + (t.kind == Tok::End ? " but reached end of input" : " but found '" + t.text + "'"), t.line, t.column);
				}
				return _toks[_pos++];
			}
			[[noreturn]] void error(const std::string& msg) const
			{
				throw ParseError(msg, peek().line, peek().column);
			}

			Rule rule(std::uint32_t scope)
			{
				Rule r;
				r.scope = scope;
				const Token& name = peek();
				if (name.kind != Tok::Lower && name.kind != Tok::Upper)
					error("expected rule name");
				++_pos;
				r.name = name.text;
				expect(Tok::At, "'@'");

				std::vector< Chr > first = heads(scope);
				if (accept(Tok::Backslash))
				{
					r.propagated = std::move(first);
					r.simplified = heads(scope);
					expect(Tok::Simp, "'<=>'");
				}
				else if (accept(Tok::Simp))
					r.simplified = std::move(first);
				else if (accept(Tok::Prop))
					r.propagated = std::move(first);
				else
					error("expected '\\', '<=>' or '==>'");

				if (has_guard())
				{
					r.guard = expr(scope);
					expect(Tok::Bar, "'|'");
				}
				r.body = body(scope);
				expect(Tok::Dot, "'.' at end of rule");
				return r;
			}

			// A guard is present iff a '|' occurs before the rule's final '.'.
			bool has_guard() const
			{
				int depth = 0;
				for (std::size_t k = _pos; k < _toks.size(); ++k)
				{
					Tok t = _toks[k].kind;
					if (t == Tok::LParen) ++depth;
					else if (t == Tok::RParen) --depth;
					else if (depth == 0 && t == Tok::Bar) return true;
					else if (depth == 0 && (t == Tok::Dot || t == Tok::End)) return false;
				}
				return false;
			}

			std::vector< Chr > heads(std::uint32_t scope)
			{
				std::vector< Chr > hs;
				do
				{
					hs.push_back(chr(scope));
				} while (accept(Tok::Comma));
				return hs;
			}

			Chr chr(std::uint32_t scope)
			{
				const Token& t = expect(Tok::Upper, "constraint name");
				Chr c{t.text, {}};
				if (accept(Tok::LParen))
				{
					do
					{
						c.args.push_back(expr(scope));
					} while (accept(Tok::Comma));
					expect(Tok::RParen, "')'");
				}
				return c;
			}

			std::vector< Constraint > body(std::uint32_t scope)
			{
				std::vector< Constraint > b;
				do
				{
					if (at(Tok::True) && (peek(1).kind == Tok::Comma || peek(1).kind == Tok::Dot))
					{
						++_pos;
						continue;
					}
					b.push_back(body_item(scope));
				} while (accept(Tok::Comma));
				return b;
			}

			Constraint body_item(std::uint32_t scope)
			{
				if (at(Tok::Upper))
					return chr(scope);
				Term lhs = expr(scope);
				expect(Tok::Equals, "'=' in equation");
				Term rhs = expr(scope);
				return Equation{std::move(lhs), std::move(rhs)};
			}

			Term expr(std::uint32_t scope) { return disjunction(scope); }

			Term disjunction(std::uint32_t scope)
			{
				Term t = conjunction(scope);
				while (accept(Tok::OrOr))
					t = Term::app(Op::Or, std::move(t), conjunction(scope));
				return t;
			}

			Term conjunction(std::uint32_t scope)
			{
				Term t = comparison(scope);
				while (accept(Tok::AndAnd))
					t = Term::app(Op::And, std::move(t), comparison(scope));
				return t;
			}

			Term comparison(std::uint32_t scope)
			{
				Term t = additive(scope);
				static const std::pair< Tok, Op > cmp[] = {
					{Tok::Gt, Op::Gt}, {Tok::Ge, Op::Ge}, {Tok::Lt, Op::Lt},
					{Tok::Le, Op::Le}, {Tok::EqEq, Op::Eq}, {Tok::Ne, Op::Ne},
				};
				for (const auto& [tok, op] : cmp)
					if (accept(tok))
						return Term::app(op, std::move(t), additive(scope));
				return t;
			}

			Term additive(std::uint32_t scope)
			{
				Term t = multiplicative(scope);
				for (;;)
				{
					if (accept(Tok::Plus)) t = Term::app(Op::Add, std::move(t), multiplicative(scope));
					else if (accept(Tok::Minus)) t = Term::app(Op::Sub, std::move(t), multiplicative(scope));
					else return t;
				}
			}

			Term multiplicative(std::uint32_t scope)
			{
				Term t = primary(scope);
				while (accept(Tok::Star))
					t = Term::app(Op::Mul, std::move(t), primary(scope));
				return t;
			}

			Term primary(std::uint32_t scope)
			{
				const Token& t = peek();
				switch (t.kind)
				{
					case Tok::Int:
						++_pos;
						return Term::integer(to_int(t.text, false, t));
					case Tok::Minus:
						if (peek(1).kind == Tok::Int)
						{
							const Token& digits = peek(1);
							_pos += 2;
							return Term::integer(to_int(digits.text, true, digits));
						}
						error("expected term");
					case Tok::True: ++_pos; return Term::boolean(true);
					case Tok::False: ++_pos; return Term::boolean(false);
					case Tok::Atom: ++_pos; return Term::atom(t.text);
					case Tok::Lower: ++_pos; return Term::var(t.text, scope);
					case Tok::LParen:
					{
						++_pos;
						Term inner = expr(scope);
						expect(Tok::RParen, "')'");
						return inner;
					}
					case Tok::Upper:
						error("constraint '" + t.text + "' used where a term is expected");
					default:
						error(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
				}
			}

			std::int64_t to_int(const std::string& digits, bool negative, const Token& at) const
			{
				std::string s = negative ? "-" + digits : digits;
				std::int64_t v = 0;
				auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
				if (ec != std::errc() || p != s.data() + s.size())
					throw ParseError("integer literal out of range", at.line, at.column);
				return v;
			}

			std::vector< Token > _toks;
			std::size_t _pos = 0;
		};

		void head_vars(const Rule& r, std::set< Var >& out)
		{
			for (std::size_t k = 0; k < r.head_count(); ++k)
				for (const auto& a : r.head(k).args)
					collect_vars(a, out);
		}

		std::set< Var > term_vars(const Term& t)
		{
			std::set< Var > vs;
			collect_vars(t, vs);
			return vs;
		}

		bool subset(const std::set< Var >& a, const std::set< Var >& b)
		{
			return std::includes(b.begin(), b.end(), a.begin(), a.end());
		}

		// Greedy join order: next head is the first (textually) that can use an
		// index lookup under the bindings so far, else the first remaining one.
		// Guard conjuncts are placed right after their variables are bound.
		std::vector< JoinStep > plan_for(const Rule& r, const std::vector< Term >& conjuncts, std::size_t active)
		{
			std::vector< JoinStep > plan;
			std::set< Var > bound;
			for (const auto& a : r.head(active).args)
				collect_vars(a, bound);

			std::vector< bool > placed(conjuncts.size(), false);
			auto place_guards = [&]() {
				for (std::size_t g = 0; g < conjuncts.size(); ++g)
					if (!placed[g] && subset(term_vars(conjuncts[g]), bound))
					{
						plan.push_back({JoinStep::Kind::Guard, g});
						placed[g] = true;
					}
			};
			place_guards();

			std::vector< std::size_t > remaining;
			for (std::size_t k = 0; k < r.head_count(); ++k)
				if (k != active) remaining.push_back(k);

			while (!remaining.empty())
			{
				auto keyed = std::find_if(remaining.begin(), remaining.end(), [&](std::size_t k) {
					for (const auto& a : r.head(k).args)
						if (subset(term_vars(a), bound)) return true;
					return false;
				});
				auto pick = keyed != remaining.end() ? keyed : remaining.begin();
				std::size_t k = *pick;
				remaining.erase(pick);
				plan.push_back({JoinStep::Kind::Head, k});
				for (const auto& a : r.head(k).args)
					collect_vars(a, bound);
				place_guards();
			}
			// Range restriction guarantees every conjunct has been placed.
			return plan;
		}

		void print_list(std::ostringstream& os, const std::vector< Chr >& cs)
		{
			for (std::size_t i = 0; i < cs.size(); ++i)
			{
				if (i) os << ", ";
				os << to_string(cs[i]);
			}
		}
	}

	Program parse_program(std::string_view text)
	{
		Parser parser(text);
		Program p = parser.program();
		validate(p);
		compile_occurrences(p);
		return p;
	}

	std::vector< Constraint > parse_goals(std::string_view text)
	{
		Parser parser(text);
		auto goals = parser.goals();
		for (auto& g : goals)
			g = simplify_ground(g);
		return goals;
	}

	Term parse_term(std::string_view text, std::uint32_t scope)
	{
		Parser parser(text);
		return parser.lone_term(scope);
	}

	Constraint parse_constraint(std::string_view text, std::uint32_t scope)
	{
		Parser parser(text);
		return parser.lone_constraint(scope);
	}

	void validate(const Program& p)
	{
		std::set< std::string > names;
		for (const auto& r : p.rules)
		{
			if (!names.insert(r.name).second)
				throw ValidationError("duplicate rule name '" + r.name + "'");
			if (r.head_count() == 0)
				throw ValidationError("rule '" + r.name + "' has an empty head");

			std::set< Var > hv;
			head_vars(r, hv);
			std::set< Var > used;
			collect_vars(r.guard, used);
			for (const auto& b : r.body)
				collect_vars(b, used);
			for (const auto& v : used)
				if (!hv.count(v))
					throw ValidationError("variable '" + v.name + "' in rule '" + r.name + "' does not occur in its head");
		}
	}

	std::vector< Term > split_conjuncts(const Term& guard)
	{
		std::vector< Term > out;
		if (guard.is_app() && guard.as_app().op == Op::And)
		{
			for (const auto& a : guard.as_app().args)
			{
				auto sub = split_conjuncts(a);
				out.insert(out.end(), sub.begin(), sub.end());
			}
		}
		else if (!(guard.is_value() && guard.as_value() == Value{true}))
			out.push_back(guard);
		return out;
	}

	void compile_occurrences(Program& p)
	{
		p.occurrences.clear();
		p.guard_conjuncts.clear();
		for (const auto& r : p.rules)
			p.guard_conjuncts.push_back(split_conjuncts(r.guard));

		for (std::size_t ri = 0; ri < p.rules.size(); ++ri)
		{
			const Rule& r = p.rules[ri];
			for (std::size_t k = 0; k < r.head_count(); ++k)
			{
				Occurrence occ;
				occ.rule = ri;
				occ.head = k;
				occ.role = r.role(k);
				occ.position = occ.role == Role::Propagated ? k : k - r.propagated.size();
				occ.plan = plan_for(r, p.guard_conjuncts[ri], k);
				p.occurrences[r.head(k).pred].push_back(std::move(occ));
			}
		}
	}

	std::string to_string(const Rule& r)
	{
		std::ostringstream os;
		os << r.name << " @ ";
		if (r.simplified.empty())
		{
			print_list(os, r.propagated);
			os << " ==> ";
		}
		else if (r.propagated.empty())
		{
			print_list(os, r.simplified);
			os << " <=> ";
		}
		else
		{
			print_list(os, r.propagated);
			os << " \\ ";
			print_list(os, r.simplified);
			os << " <=> ";
		}
		if (!(r.guard.is_value() && r.guard.as_value() == Value{true}))
			os << to_string(r.guard) << " | ";
		if (r.body.empty())
			os << "true";
		for (std::size_t i = 0; i < r.body.size(); ++i)
		{
			if (i) os << ", ";
			os << to_string(r.body[i]);
		}
		os << '.';
		return os.str();
	}

	std::string to_string(const Program& p)
	{
		std::string s;
		for (const auto& r : p.rules)
			s += to_string(r) + "\n";
		return s;
	}
}
