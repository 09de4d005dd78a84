//! Holds the `acceptance` test target, which runs after every soliton-core
//! suite so that a failing criterion does not stop the others.
