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

#include <chr/term.hh>

#include <functional>
#include <sstream>

namespace chr
{
	const char* op_symbol(Op op)
	{
		switch (op)
		{
			case Op::Add: return "+";
			case Op::Sub: return "-";
			case Op::Mul: return "*";
			case Op::Gt: return ">";
			case Op::Ge: return ">=";
			case Op::Lt: return "<";
			case Op::Le: return "<=";
			case Op::Eq: return "==";
			case Op::Ne: return "!=";
			case Op::And: return "&&";
			case Op::Or: return "||";
		}
		return "?";
	}

	Term Term::app(Op op, Term lhs, Term rhs)
	{
		std::vector< Term > args;
		args.reserve(2);
		args.push_back(std::move(lhs));
		args.push_back(std::move(rhs));
		return Term(App{op, std::move(args)});
	}

	Substitution::Substitution(std::initializer_list< Map::value_type > init)
	{
		for (const auto& [v, t] : init)
			bind(v, t);
	}

	const Term* Substitution::find(const Var& v) const
	{
		auto it = _bindings.find(v);
		return it == _bindings.end() ? nullptr : &it->second;
	}

	void Substitution::bind(const Var& v, Term t)
	{
		if (t.is_var() && t.as_var() == v)
			return;
		_bindings.insert_or_assign(v, std::move(t));
	}

	// ---------------------------------------------------------------------

	bool is_ground(const Term& t)
	{
		if (t.is_var()) return false;
		if (t.is_value()) return true;
		for (const auto& a : t.as_app().args)
			if (!is_ground(a)) return false;
		return true;
	}

	bool is_ground(const Chr& c)
	{
		for (const auto& a : c.args)
			if (!is_ground(a)) return false;
		return true;
	}

	bool is_ground(const Constraint& c)
	{
		if (const auto* chr = std::get_if< Chr >(&c))
			return is_ground(*chr);
		const auto& e = std::get< Equation >(c);
		return is_ground(e.lhs) && is_ground(e.rhs);
	}

	void collect_vars(const Term& t, std::set< Var >& out)
	{
		if (t.is_var())
			out.insert(t.as_var());
		else if (t.is_app())
			for (const auto& a : t.as_app().args)
				collect_vars(a, out);
	}

	void collect_vars(const Constraint& c, std::set< Var >& out)
	{
		if (const auto* chr = std::get_if< Chr >(&c))
		{
			for (const auto& a : chr->args)
				collect_vars(a, out);
		}
		else
		{
			const auto& e = std::get< Equation >(c);
			collect_vars(e.lhs, out);
			collect_vars(e.rhs, out);
		}
	}

	bool occurs(const Var& v, const Term& t)
	{
		if (t.is_var()) return t.as_var() == v;
		if (t.is_value()) return false;
		for (const auto& a : t.as_app().args)
			if (occurs(v, a)) return true;
		return false;
	}

	std::size_t hash_term(const Term& t)
	{
		auto mix = [](std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); };
		if (t.is_var())
			return mix(std::hash< std::string >{}(t.as_var().name), t.as_var().scope);
		if (t.is_value())
		{
			const auto& v = t.as_value();
			std::size_t h = v.index() * 31;
			if (const auto* i = std::get_if< std::int64_t >(&v)) return mix(h, std::hash< std::int64_t >{}(*i));
			if (const auto* b = std::get_if< bool >(&v)) return mix(h, *b ? 1 : 2);
			return mix(h, std::hash< std::string >{}(std::get< Atom >(v).name));
		}
		std::size_t h = 7 + static_cast< std::size_t >(t.as_app().op);
		for (const auto& a : t.as_app().args)
			h = mix(h, hash_term(a));
		return h;
	}

	// ---------------------------------------------------------------------

	Term apply(const Substitution& s, const Term& t)
	{
		if (s.empty()) return t;
		if (t.is_var())
		{
			const Term* b = s.find(t.as_var());
			return b ? *b : t;
		}
		if (t.is_value()) return t;
		const App& a = t.as_app();
		std::vector< Term > args;
		args.reserve(a.args.size());
		for (const auto& x : a.args)
			args.push_back(apply(s, x));
		return Term(App{a.op, std::move(args)});
	}

	Chr apply(const Substitution& s, const Chr& c)
	{
		Chr r{c.pred, {}};
		r.args.reserve(c.args.size());
		for (const auto& a : c.args)
			r.args.push_back(apply(s, a));
		return r;
	}

	Equation apply(const Substitution& s, const Equation& e)
	{
		return Equation{apply(s, e.lhs), apply(s, e.rhs)};
	}

	Constraint apply(const Substitution& s, const Constraint& c)
	{
		if (const auto* chr = std::get_if< Chr >(&c))
			return apply(s, *chr);
		return apply(s, std::get< Equation >(c));
	}

	// ---------------------------------------------------------------------

	bool match_term(const Term& pattern, const Term& candidate, Substitution& s)
	{
		if (pattern.is_var())
		{
			if (const Term* b = s.find(pattern.as_var()))
				return *b == candidate;
			s.bind(pattern.as_var(), candidate);
			return true;
		}
		if (pattern.is_value())
			return candidate.is_value() && candidate.as_value() == pattern.as_value();
		if (!candidate.is_app()) return false;
		const App& p = pattern.as_app();
		const App& c = candidate.as_app();
		if (p.op != c.op || p.args.size() != c.args.size()) return false;
		for (std::size_t i = 0; i < p.args.size(); ++i)
			if (!match_term(p.args[i], c.args[i], s)) return false;
		return true;
	}

	std::optional< Substitution > match(const Chr& pattern, const Chr& candidate, Substitution seed)
	{
		if (pattern.pred != candidate.pred || pattern.args.size() != candidate.args.size())
			return std::nullopt;
		for (std::size_t i = 0; i < pattern.args.size(); ++i)
			if (!match_term(pattern.args[i], candidate.args[i], seed))
				return std::nullopt;
		return seed;
	}

	// ---------------------------------------------------------------------

	namespace
	{
		// Bind v to t (t already normalized under s, v not occurring in t) and
		// keep s idempotent.
		void extend_solved(Substitution::Map& m, const Var& v, const Term& t)
		{
			Substitution single;
			single.bind(v, t);
			for (auto& [w, u] : m)
				if (occurs(v, u))
					u = simplify_ground(apply(single, u));
			m.insert_or_assign(v, t);
		}
	}

	bool unify_into(Substitution& s, const Term& a, const Term& b)
	{
		std::vector< std::pair< Term, Term > > work;
		work.emplace_back(normalize(s, a), normalize(s, b));
		while (!work.empty())
		{
			auto [x, y] = std::move(work.back());
			work.pop_back();
			if (x == y) continue;
			if (x.is_var() && y.is_var())
			{
				// Larger variable points to the smaller one.
				const Var& vx = x.as_var();
				const Var& vy = y.as_var();
				const Var& from = vx < vy ? vy : vx;
				const Term to = vx < vy ? x : y;
				Var from_copy = from;
				extend_solved(s._bindings, from_copy, to);
				Substitution single;
				single.bind(from_copy, to);
				for (auto& [p, q] : work)
				{
					p = simplify_ground(apply(single, p));
					q = simplify_ground(apply(single, q));
				}
				continue;
			}
			if (y.is_var()) std::swap(x, y);
			if (x.is_var())
			{
				const Var v = x.as_var();
				if (occurs(v, y)) return false;
				extend_solved(s._bindings, v, y);
				Substitution single;
				single.bind(v, y);
				for (auto& [p, q] : work)
				{
					p = simplify_ground(apply(single, p));
					q = simplify_ground(apply(single, q));
				}
				continue;
			}
			if (x.is_value() || y.is_value())
				return false;
			const App& ax = x.as_app();
			const App& ay = y.as_app();
			if (ax.op != ay.op || ax.args.size() != ay.args.size())
				return false;
			for (std::size_t i = 0; i < ax.args.size(); ++i)
				work.emplace_back(ax.args[i], ay.args[i]);
		}
		return true;
	}

	std::optional< Substitution > mgu(std::span< const Equation > eqs)
	{
		Substitution s;
		for (const auto& e : eqs)
			if (!unify_into(s, e.lhs, e.rhs))
				return std::nullopt;
		return s;
	}

	// ---------------------------------------------------------------------

	namespace
	{
		std::optional< Value > fail(std::string* error, const char* msg)
		{
			if (error) *error = msg;
			return std::nullopt;
		}
	}

	std::optional< Value > eval_ground(const Term& t, std::string* error)
	{
		if (t.is_var()) return fail(error, "non-ground term");
		if (t.is_value()) return t.as_value();

		const App& a = t.as_app();
		if (a.args.size() != 2) return fail(error, "bad arity");
		auto lhs = eval_ground(a.args[0], error);
		if (!lhs) return std::nullopt;
		auto rhs = eval_ground(a.args[1], error);
		if (!rhs) return std::nullopt;

		const auto* li = std::get_if< std::int64_t >(&*lhs);
		const auto* ri = std::get_if< std::int64_t >(&*rhs);
		const auto* lb = std::get_if< bool >(&*lhs);
		const auto* rb = std::get_if< bool >(&*rhs);
		const auto* la = std::get_if< Atom >(&*lhs);
		const auto* ra = std::get_if< Atom >(&*rhs);

		switch (a.op)
		{
			case Op::Add:
			case Op::Sub:
			case Op::Mul:
			{
				if (!li || !ri) return fail(error, "arithmetic on non-integer");
				std::int64_t r = 0;
				bool overflow = false;
				if (a.op == Op::Add) overflow = __builtin_add_overflow(*li, *ri, &r);
				else if (a.op == Op::Sub) overflow = __builtin_sub_overflow(*li, *ri, &r);
				else overflow = __builtin_mul_overflow(*li, *ri, &r);
				if (overflow) return fail(error, "integer overflow");
				return Value{r};
			}
			case Op::Gt:
			case Op::Ge:
			case Op::Lt:
			case Op::Le:
			{
				std::strong_ordering cmp = std::strong_ordering::equal;
				if (li && ri) cmp = *li <=> *ri;
				else if (la && ra) cmp = la->name <=> ra->name;
				else return fail(error, "ordering between incomparable values");
				switch (a.op)
				{
					case Op::Gt: return Value{cmp > 0};
					case Op::Ge: return Value{cmp >= 0};
					case Op::Lt: return Value{cmp < 0};
					default: return Value{cmp <= 0};
				}
			}
			case Op::Eq:
			case Op::Ne:
			{
				if (lhs->index() != rhs->index()) return fail(error, "equality between different types");
				bool eq = *lhs == *rhs;
				return Value{a.op == Op::Eq ? eq : !eq};
			}
			case Op::And:
			case Op::Or:
			{
				if (!lb || !rb) return fail(error, "boolean operator on non-boolean");
				return Value{a.op == Op::And ? (*lb && *rb) : (*lb || *rb)};
			}
		}
		return fail(error, "unknown operator");
	}

	Term simplify_ground(const Term& t)
	{
		if (!t.is_app()) return t;
		const App& a = t.as_app();
		std::vector< Term > args;
		args.reserve(a.args.size());
		bool ground = true;
		for (const auto& x : a.args)
		{
			args.push_back(simplify_ground(x));
			ground = ground && args.back().is_value();
		}
		Term r(App{a.op, std::move(args)});
		if (ground)
			if (auto v = eval_ground(r))
				return Term(*v);
		return r;
	}

	Chr simplify_ground(const Chr& c)
	{
		Chr r{c.pred, {}};
		r.args.reserve(c.args.size());
		for (const auto& a : c.args)
			r.args.push_back(simplify_ground(a));
		return r;
	}

	Constraint simplify_ground(const Constraint& c)
	{
		if (const auto* chr = std::get_if< Chr >(&c))
			return simplify_ground(*chr);
		const auto& e = std::get< Equation >(c);
		return Equation{simplify_ground(e.lhs), simplify_ground(e.rhs)};
	}

	Term normalize(const Substitution& theta, const Term& t) { return simplify_ground(apply(theta, t)); }
	Chr normalize(const Substitution& theta, const Chr& c) { return simplify_ground(apply(theta, c)); }
	Constraint normalize(const Substitution& theta, const Constraint& c) { return simplify_ground(apply(theta, c)); }

	namespace
	{
		// Empty when the answer depends on later bindings.
		std::optional< bool > decide(const Substitution& theta, const Term& g)
		{
			if (g.is_app())
			{
				const App& a = g.as_app();
				if (a.op == Op::And || a.op == Op::Or)
				{
					auto l = decide(theta, a.args[0]);
					auto r = decide(theta, a.args[1]);
					bool is_and = a.op == Op::And;
					if (l == !is_and || r == !is_and) return !is_and;
					if (l && r) return is_and;
					return std::nullopt;
				}
				// Identical sides are equal whatever the variables become.
				if (a.op == Op::Eq || a.op == Op::Ne)
					if (normalize(theta, a.args[0]) == normalize(theta, a.args[1]))
						return a.op == Op::Eq;
			}
			Term n = normalize(theta, g);
			if (!is_ground(n)) return std::nullopt;
			auto v = eval_ground(n);
			if (!v) return false;
			const auto* b = std::get_if< bool >(&*v);
			return b && *b;
		}
	}

	bool entails_solved(const Substitution& theta, const Substitution& phi, const Term& guard)
	{
		return decide(theta, apply(phi, guard)).value_or(false);
	}

	Entailment entails(std::span< const Equation > eqs, const Substitution& phi, const Term& guard)
	{
		auto theta = mgu(eqs);
		if (!theta) return Entailment{false, true};
		return Entailment{entails_solved(*theta, phi, guard), false};
	}

	// ---------------------------------------------------------------------

	namespace
	{
		int precedence(Op op)
		{
			switch (op)
			{
				case Op::Or: return 1;
				case Op::And: return 2;
				case Op::Gt: case Op::Ge: case Op::Lt: case Op::Le: case Op::Eq: case Op::Ne: return 3;
				case Op::Add: case Op::Sub: return 4;
				case Op::Mul: return 5;
			}
			return 0;
		}

		bool non_associative(Op op) { return precedence(op) == 3; }

		void print(std::ostream& os, const Term& t, int min_prec, bool nested)
		{
			if (t.is_var())
			{
				os << t.as_var().name;
				return;
			}
			if (t.is_value())
			{
				const auto& v = t.as_value();
				const auto* i = std::get_if< std::int64_t >(&v);
				if (i && *i < 0 && nested) os << '(' << *i << ')';
				else os << to_string(v);
				return;
			}
			const App& a = t.as_app();
			int p = precedence(a.op);
			bool parens = p < min_prec;
			if (parens) os << '(';
			print(os, a.args[0], non_associative(a.op) ? p + 1 : p, true);
			os << op_symbol(a.op);
			print(os, a.args[1], p + 1, true);
			if (parens) os << ')';
		}
	}

	std::string to_string(const Value& v)
	{
		if (const auto* i = std::get_if< std::int64_t >(&v)) return std::to_string(*i);
		if (const auto* b = std::get_if< bool >(&v)) return *b ? "true" : "false";
		return "'" + std::get< Atom >(v).name + "'";
	}

	std::string to_string(const Term& t)
	{
		std::ostringstream os;
		print(os, t, 0, false);
		return os.str();
	}

	std::string to_string(const Chr& c)
	{
		std::string s = c.pred;
		if (c.args.empty()) return s;
		s += '(';
		for (std::size_t i = 0; i < c.args.size(); ++i)
		{
			if (i) s += ',';
			s += to_string(c.args[i]);
		}
		s += ')';
		return s;
	}

	std::string to_string(const Equation& e)
	{
		// Comparisons bind looser than '=' would suggest; keep them readable.
		std::ostringstream os;
		print(os, e.lhs, 4, false);
		os << '=';
		print(os, e.rhs, 4, false);
		return os.str();
	}

	std::string to_string(const Constraint& c)
	{
		if (const auto* chr = std::get_if< Chr >(&c))
			return to_string(*chr);
		return to_string(std::get< Equation >(c));
	}

	std::string to_string(const Substitution& s)
	{
		std::string r = "{";
		bool first = true;
		for (const auto& [v, t] : s)
		{
			if (!first) r += ',';
			first = false;
			r += v.name + "=" + to_string(t);
		}
		return r + "}";
	}

	std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }
	std::ostream& operator<<(std::ostream& os, const Constraint& c) { return os << to_string(c); }
}
