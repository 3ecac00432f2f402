#![allow(dead_code)]

pub mod synth;

pub const OVERFLOW: &str = "pragma solidity ^0.4.15;

contract Overflow {
    uint private r=0;

    function addValue(uint value) returns (bool){
        // possible overflow
        r += value;
    }
}
";
