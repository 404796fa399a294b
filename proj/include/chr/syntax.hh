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

#ifndef CHR_SYNTAX_HH_
#define CHR_SYNTAX_HH_

#include <chr/term.hh>

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chr
{
	class ParseError : public std::runtime_error
	{
	public:
		ParseError(const std::string& msg, int line, int column);

		int line() const { return _line; }
		int column() const { return _column; }

	private:
		int _line;
		int _column;
	};

	class ValidationError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	enum class Role
	{
		Propagated,
		Simplified
	};

	/**
	 * @brief Simpagation rule  name @ propagated \ simplified <=> guard | body
	 *
	 * Heads are addressed by a single index: propagated heads first, then
	 * simplified heads, each in textual order.
	 */
	struct Rule
	{
		std::string name;
		std::vector< Chr > propagated;
		std::vector< Chr > simplified;
		Term guard = Term::boolean(true);
		std::vector< Constraint > body;
		/// Variable scope of this rule (index + 1 within its program).
		std::uint32_t scope = 0;

		std::size_t head_count() const { return propagated.size() + simplified.size(); }
		const Chr& head(std::size_t k) const;
		Role role(std::size_t k) const { return k < propagated.size() ? Role::Propagated : Role::Simplified; }
		bool is_propagation() const { return simplified.empty(); }

		bool operator==(const Rule&) const = default;
	};

	/// One step of the partner search for an occurrence.
	struct JoinStep
	{
		enum class Kind { Head, Guard } kind;
		/// Head index for Kind::Head, guard conjunct index for Kind::Guard.
		std::size_t index;

		bool operator==(const JoinStep&) const = default;
	};

	struct Occurrence
	{
		std::size_t rule;
		/// Index into the rule's combined head list.
		std::size_t head;
		/// Position inside the propagated or simplified list.
		std::size_t position;
		Role role;
		/// Remaining heads and guard conjuncts in search order.
		std::vector< JoinStep > plan;

		bool operator==(const Occurrence&) const = default;
	};

	struct Program
	{
		std::vector< Rule > rules;
		/// Guard of each rule split on top-level &&.
		std::vector< std::vector< Term > > guard_conjuncts;
		std::map< std::string, std::vector< Occurrence > > occurrences;

		const Rule* find_rule(std::string_view name) const;
		std::size_t rule_index(std::string_view name) const;
		const std::vector< Occurrence >& occurrences_of(const std::string& pred) const;
	};

	/**
	 * @brief Parse, validate and compile a program
	 *
	 * Grammar (ASCII, newlines insignificant, % starts a line comment):
	 *
	 *     name @ Hp \ Hs <=> guard | body.
	 *     name @ Hs <=> guard | body.
	 *     name @ Hp ==> guard | body.
	 *
	 * "guard |" is optional and a body of "true" is empty. Predicates start
	 * with an upper-case letter, variables with a lower-case one.
	 */
	Program parse_program(std::string_view text);

	/// Comma separated goal list; duplicates are kept.
	std::vector< Constraint > parse_goals(std::string_view text);

	Term parse_term(std::string_view text, std::uint32_t scope = 0);
	Constraint parse_constraint(std::string_view text, std::uint32_t scope = 0);

	/// Range restriction, unique names and non-empty heads.
	void validate(const Program& p);

	/// Fill guard_conjuncts and occurrences (rule order, then head order).
	void compile_occurrences(Program& p);

	std::vector< Term > split_conjuncts(const Term& guard);

	std::string to_string(const Rule& r);
	std::string to_string(const Program& p);
}

#endif /* CHR_SYNTAX_HH_ */
