//! Regular separability of one-counter-net languages.
//!
//! Given two one-counter nets `A` and `B`, [`decider::check_separability`]
//! either finds a modular approximation `A_n` of `A` whose language is disjoint
//! from `L(B)` (a regular separator), or certifies non-separability with a
//! linear set that contains witnesses for every modulus, or exhibits a common
//! word. Every verdict can be re-checked by [`decider::verify_verdict`].
//!
//! The supporting modules are usable on their own:
//!
//! * [`automata`]: NFAs, one-counter nets and automata, 2-dimensional VASS,
//!   products, and the text format.
//! * [`approx`]: the `n`-approximation NFA of a net.
//! * [`reach1`]: exact one-counter emptiness and bounded VASS search.
//! * [`semilinear`]: linear sets and minimal solutions of Diophantine systems.
//! * [`lps`]: linear path schemes and their reachability sets.
//! * [`parikh`]: Parikh images of middle runs via pumping.
//! * [`reductions`]: hardness instance generators and a two-counter machine
//!   interpreter.
//! * [`random`]: seeded generators of nets, automata, VASS and systems.
//! * [`cli`]: the command implementations behind the `ocnsep` binary.

pub mod automata;
pub mod cli;
pub mod approx;
pub mod decider;
pub mod lps;
pub mod parikh;
pub mod random;
pub mod reach1;
pub mod reductions;
pub mod semilinear;
