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

#ifndef CHR_TERM_HH_
#define CHR_TERM_HH_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

/**
 * @brief First-order terms, constraints and the equational theory used by
 * every engine: substitution, one-way matching, unification and ground
 * guard evaluation.
 *
 * All functions in this header are pure and may be called concurrently.
 */
namespace chr
{
	/**
	 * @brief Logical variable
	 *
	 * The scope separates name spaces: scope 0 holds variables of the goals
	 * (and therefore of the store), scope k > 0 holds the variables of the
	 * k-th rule of a program. Rule variables are renamed apart by giving each
	 * rule its own scope, so printing only ever shows the name.
	 */
	struct Var
	{
		std::string name;
		std::uint32_t scope = 0;

		auto operator<=>(const Var&) const = default;
		bool operator==(const Var&) const = default;
	};

	/// Symbolic constant, totally ordered lexicographically.
	struct Atom
	{
		std::string name;

		auto operator<=>(const Atom&) const = default;
		bool operator==(const Atom&) const = default;
	};

	using Value = std::variant< std::int64_t, bool, Atom >;

	/// Built-in function symbols. All of them are binary.
	enum class Op
	{
		Add, Sub, Mul,
		Gt, Ge, Lt, Le, Eq, Ne,
		And, Or
	};

	const char* op_symbol(Op op);

	class Term;

	struct App
	{
		Op op;
		std::vector< Term > args;

		bool operator==(const App&) const = default;
	};

	class Term
	{
	public:
		using Node = std::variant< Var, Value, App >;

		Term() : _node(Value{std::int64_t{0}}) { }
		Term(Var v) : _node(std::move(v)) { }
		Term(Value v) : _node(std::move(v)) { }
		Term(App a) : _node(std::move(a)) { }

		static Term var(std::string name, std::uint32_t scope = 0) { return Term(Var{std::move(name), scope}); }
		static Term integer(std::int64_t i) { return Term(Value{i}); }
		static Term boolean(bool b) { return Term(Value{b}); }
		static Term atom(std::string name) { return Term(Value{Atom{std::move(name)}}); }
		static Term app(Op op, Term lhs, Term rhs);

		const Node& node() const { return _node; }

		bool is_var() const { return std::holds_alternative< Var >(_node); }
		bool is_value() const { return std::holds_alternative< Value >(_node); }
		bool is_app() const { return std::holds_alternative< App >(_node); }

		const Var& as_var() const { return std::get< Var >(_node); }
		const Value& as_value() const { return std::get< Value >(_node); }
		const App& as_app() const { return std::get< App >(_node); }

		bool operator==(const Term&) const = default;

	private:
		Node _node;
	};

	/// CHR constraint p(t1,...,tn).
	struct Chr
	{
		std::string pred;
		std::vector< Term > args;

		bool operator==(const Chr&) const = default;
	};

	/// Equation t1 = t2.
	struct Equation
	{
		Term lhs;
		Term rhs;

		bool operator==(const Equation&) const = default;
	};

	using Constraint = std::variant< Chr, Equation >;

	inline bool is_chr(const Constraint& c) { return std::holds_alternative< Chr >(c); }
	inline bool is_equation(const Constraint& c) { return std::holds_alternative< Equation >(c); }

	/**
	 * @brief Finite map from variables to terms
	 *
	 * Never binds a variable to itself. Substitutions produced by mgu() and
	 * unify_into() are idempotent.
	 */
	class Substitution
	{
	public:
		using Map = std::map< Var, Term >;

		Substitution() = default;
		Substitution(std::initializer_list< Map::value_type > init);

		const Term* find(const Var& v) const;
		/// Insert or overwrite a binding. Binding v to itself is a no-op.
		void bind(const Var& v, Term t);
		void erase(const Var& v) { _bindings.erase(v); }

		bool empty() const { return _bindings.empty(); }
		std::size_t size() const { return _bindings.size(); }
		Map::const_iterator begin() const { return _bindings.begin(); }
		Map::const_iterator end() const { return _bindings.end(); }

		bool operator==(const Substitution&) const = default;

	private:
		friend bool unify_into(Substitution&, const Term&, const Term&);
		Map _bindings;
	};

	// ---------------------------------------------------------------------
	// Structure

	bool is_ground(const Term& t);
	bool is_ground(const Chr& c);
	bool is_ground(const Constraint& c);

	void collect_vars(const Term& t, std::set< Var >& out);
	void collect_vars(const Constraint& c, std::set< Var >& out);

	bool occurs(const Var& v, const Term& t);

	std::size_t hash_term(const Term& t);

	// ---------------------------------------------------------------------
	// Substitution

	Term apply(const Substitution& s, const Term& t);
	Chr apply(const Substitution& s, const Chr& c);
	Equation apply(const Substitution& s, const Equation& e);
	Constraint apply(const Substitution& s, const Constraint& c);

	/**
	 * @brief One-way matching of a rule head against a store constraint
	 *
	 * Extends @p seed with bindings for variables of @p pattern only so that
	 * apply(result, pattern) == candidate. Variables of the candidate are
	 * never bound. Returns nothing when predicates or arities differ or a
	 * binding conflicts.
	 */
	std::optional< Substitution > match(const Chr& pattern, const Chr& candidate, Substitution seed);
	bool match_term(const Term& pattern, const Term& candidate, Substitution& s);

	// ---------------------------------------------------------------------
	// Equations

	/**
	 * @brief Extend an idempotent solved form with the equation a = b
	 *
	 * Syntactic unification with occurs check; ground built-in applications
	 * are evaluated first. Variable-variable bindings always point from the
	 * larger to the smaller variable, which makes the solved form of a set
	 * of equations independent of the order they were added in. On failure
	 * @p s is left unspecified.
	 */
	bool unify_into(Substitution& s, const Term& a, const Term& b);

	/// Most general unifier of a set of equations, or nothing if inconsistent.
	std::optional< Substitution > mgu(std::span< const Equation > eqs);

	// ---------------------------------------------------------------------
	// Evaluation

	/**
	 * @brief Evaluate a ground term
	 *
	 * Integer arithmetic is 64-bit and overflow is an error. Comparisons work
	 * on pairs of integers or pairs of atoms; == and != also on booleans.
	 * Returns nothing on type mismatch, overflow or non-ground input; the
	 * reason is stored in @p error when given.
	 */
	std::optional< Value > eval_ground(const Term& t, std::string* error = nullptr);

	/// Replace every ground built-in application that evaluates cleanly by its value.
	Term simplify_ground(const Term& t);
	Chr simplify_ground(const Chr& c);
	Constraint simplify_ground(const Constraint& c);

	/// apply() followed by simplify_ground().
	Term normalize(const Substitution& theta, const Term& t);
	Chr normalize(const Substitution& theta, const Chr& c);
	Constraint normalize(const Substitution& theta, const Constraint& c);

	/// Does theta(phi(guard)) evaluate to true? Non-ground guards are not entailed.
	bool entails_solved(const Substitution& theta, const Substitution& phi, const Term& guard);

	struct Entailment
	{
		bool holds = false;
		bool inconsistent = false;
	};

	/// Guard entailment against a raw set of equations.
	Entailment entails(std::span< const Equation > eqs, const Substitution& phi, const Term& guard);

	// ---------------------------------------------------------------------
	// Printing

	std::string to_string(const Value& v);
	std::string to_string(const Term& t);
	std::string to_string(const Chr& c);
	std::string to_string(const Equation& e);
	std::string to_string(const Constraint& c);
	std::string to_string(const Substitution& s);

	std::ostream& operator<<(std::ostream& os, const Term& t);
	std::ostream& operator<<(std::ostream& os, const Constraint& c);
}

#endif /* CHR_TERM_HH_ */
