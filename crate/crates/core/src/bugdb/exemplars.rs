//! Known-bug exemplars used to seed a database.
//!
//! The sources are short reconstructions around each known buggy
//! statement: the statement and its enclosing function and contract are
//! kept, the rest of the original contract is trimmed.

use super::{BugDb, BugRecord, Category, Split};
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct Exemplar {
    pub name: &'static str,
    pub source: &'static str,
    pub line_start: u32,
    pub line_end: u32,
    pub category: Category,
}

pub const OVERFLOW: &str = "pragma solidity ^0.4.15;

contract Overflow {
    uint private r=0;

    function addValue(uint value) returns (bool){
        // possible overflow
        r += value;
    }
}
";

pub const RUBIXI: &str = "contract Rubixi {
    address private owner;
    uint private collectedFees;
    function DynamicPyramid() {
        owner = msg.sender;
    }
    function collectAllFees() {
        owner.send(collectedFees);
    }
}
";

pub const MULTIPLICATOR_X3: &str = "contract MultiplicatorX3 {
    address public Owner = msg.sender;
    function multiplicate(address adr)
    public
    payable
    {
        if(msg.value>=this.balance)
        {
            adr.transfer(this.balance+msg.value);
        }
    }
}
";

pub const WMC_TOKEN: &str = "pragma solidity ^0.4.16;

contract WMCToken {
    mapping (address => uint256) balances;
    event Transfer(address indexed _from, address indexed _to, uint256 _value);

    function batchTransfer(address[] _receivers, uint256 _value) public returns (bool) {
        uint cnt = _receivers.length;
        uint256 amount = uint256(cnt) * _value;
        require(cnt > 0 && cnt <= 20);
        require(_value > 0 && balances[msg.sender] >= amount);

        balances[msg.sender] = balances[msg.sender] - amount;
        for (uint i = 0; i < cnt; i++) {
            balances[_receivers[i]] = balances[_receivers[i]] + _value;
            Transfer(msg.sender, _receivers[i], _value);
        }
        return true;
    }
}
";

/// The patched contract: SafeMath arithmetic and a pausable guard on the
/// batch function.
pub const WMC_TOKEN_FIXED: &str = "pragma solidity ^0.4.24;

library SafeMath {
    function mul(uint256 a, uint256 b) internal pure returns (uint256) {
        if (a == 0) {
            return 0;
        }
        uint256 c = a * b;
        assert(c / a == b);
        return c;
    }
}

contract WMCToken {
    using SafeMath for uint256;
    mapping (address => uint256) internal balances;
    bool public paused;
    event Transfer(address indexed from, address indexed to, uint256 value);

    modifier whenNotPaused() {
        require(!paused);
        _;
    }

    function batchTransfer(address[] _receivers, uint256 _value) public whenNotPaused returns (bool) {
        uint cnt = _receivers.length;
        uint256 amount = _value.mul(uint256(cnt));
        require(cnt > 0 && cnt <= 20);
        require(_value > 0 && balances[msg.sender] >= amount);

        balances[msg.sender] = balances[msg.sender].sub(amount);
        for (uint i = 0; i < cnt; i++) {
            balances[_receivers[i]] = balances[_receivers[i]].add(_value);
            emit Transfer(msg.sender, _receivers[i], _value);
        }
        return true;
    }
}
";

/// Line of the patched multiplication in [`WMC_TOKEN_FIXED`].
pub const WMC_TOKEN_FIXED_LINE: u32 = 27;

pub const ETH_LEND_TOKEN: &str = "contract EthLendToken {
    address public creator;
    mapping (address => uint256) balances;
    uint public totalSupply;

    modifier onlyCreator() { if (msg.sender != creator) throw; _; }

    function issueTokens(address _to, uint _value) onlyCreator {
        balances[_to] = safeAdd(balances[_to], _value);
        totalSupply = safeAdd(totalSupply, _value);
    }
}
";

pub const UHUB_TOKEN: &str = "contract UHubToken {
    address public owner;
    mapping (address => uint256) public balanceOf;
    uint256 public totalSupply;

    modifier onlyOwner() { require(msg.sender == owner); _; }

    function mintToken(address _receiver, uint256 _amount) onlyOwner {
        balanceOf[_receiver] = add(balanceOf[_receiver], _amount);
        totalSupply = add(totalSupply, _amount);
    }
}
";

pub const PRIVATE_BANK: &str = "contract PrivateBank {
    mapping (address => uint) public balances;
    uint public MinDeposit = 1 ether;
    Log TransferLog;

    function Deposit() public payable {
        if(msg.value >= MinDeposit)
        {
            balances[msg.sender]+=msg.value;
            TransferLog.AddMessage(msg.sender,msg.value,\"Deposit\");
        }
    }

    function CashOut(uint _am)
    {
        if(_am<=balances[msg.sender])
        {
            if(msg.sender.call.value(_am)())
            {
                balances[msg.sender]-=_am;
                TransferLog.AddMessage(msg.sender,_am,\"CashOut\");
            }
        }
    }
}
";

pub const ETH_FUND: &str = "contract ETH_FUND {
    mapping (address => uint) public balances;
    uint public MinDeposit = 1 ether;
    uint lastBlock;
    Log TransferLog;

    function Deposit() public payable {
        if(msg.value > MinDeposit)
        {
            balances[msg.sender]+=msg.value;
            TransferLog.AddMessage(msg.sender,msg.value,\"Deposit\");
            lastBlock = block.number;
        }
    }

    function CashOut(uint _am)
    public
    payable
    {
        if(_am<=balances[msg.sender]&&block.number>lastBlock)
        {
            if(msg.sender.call.value(_am)())
            {
                balances[msg.sender]-=_am;
                TransferLog.AddMessage(msg.sender,_am,\"CashOut\");
            }
        }
    }
}
";

/// Line spans of the compared blocks in [`PRIVATE_BANK`] and [`ETH_FUND`].
pub const PRIVATE_BANK_BLOCK: (u32, u32) = (16, 23);
pub const ETH_FUND_BLOCK: (u32, u32) = (20, 27);
/// Lines of the compared statements in the two owner-minting tokens.
pub const ETH_LEND_LINE: u32 = 9;
pub const UHUB_LINE: u32 = 9;

pub const EXEMPLARS: &[Exemplar] = &[
    Exemplar { name: "Overflow", source: OVERFLOW, line_start: 8, line_end: 8, category: Category::OverflowUnderflow },
    Exemplar { name: "Rubixi", source: RUBIXI, line_start: 5, line_end: 5, category: Category::OverpoweredOwner },
    Exemplar {
        name: "MultiplicatorX3",
        source: MULTIPLICATOR_X3,
        line_start: 7,
        line_end: 7,
        category: Category::ImplicitVisibilityHoneyPot,
    },
    Exemplar {
        name: "MultiplicatorX3",
        source: MULTIPLICATOR_X3,
        line_start: 9,
        line_end: 9,
        category: Category::ImplicitVisibilityHoneyPot,
    },
    Exemplar { name: "WMCToken", source: WMC_TOKEN, line_start: 9, line_end: 9, category: Category::BatchOverflow },
    Exemplar {
        name: "EthLendToken",
        source: ETH_LEND_TOKEN,
        line_start: ETH_LEND_LINE,
        line_end: ETH_LEND_LINE,
        category: Category::OverpoweredOwner,
    },
    Exemplar {
        name: "PrivateBank",
        source: PRIVATE_BANK,
        line_start: 18,
        line_end: 18,
        category: Category::ImplicitVisibilityHoneyPot,
    },
];

/// Adds every exemplar to `db` in the detection split.
pub fn seed(db: &mut BugDb) -> Result<Vec<BugRecord>> {
    EXEMPLARS
        .iter()
        .map(|e| db.add_bug(e.source, e.line_start, e.line_end, e.category, Split::Detection))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bugdb::resolve_unit;
    use crate::parser::parse;

    fn unit_text(src: &str, line: u32) -> String {
        let t = parse(src).unwrap();
        let u = resolve_unit(&t, line, line).unwrap();
        let words: Vec<_> = u.terminals().iter().map(|t| t.text().to_string()).collect();
        words.join(" ")
    }

    #[test]
    fn exemplar_lines_point_at_the_bugs() {
        let mut db = BugDb::default();
        let recs = seed(&mut db).unwrap();
        let sources: Vec<_> = recs.iter().map(|r| r.statement_source.as_str()).collect();
        assert_eq!(
            sources,
            [
                "r += value;",
                "owner = msg.sender;",
                "if(msg.value>=this.balance)",
                "adr.transfer(this.balance+msg.value);",
                "uint256 amount = uint256(cnt) * _value;",
                "balances[_to] = safeAdd(balances[_to], _value);",
                "if(msg.sender.call.value(_am)())",
            ]
        );
        assert_eq!(recs[1].bug_id, "Rubixi@5-5");
    }

    #[test]
    fn fixed_line_and_blocks() {
        assert_eq!(unit_text(WMC_TOKEN_FIXED, WMC_TOKEN_FIXED_LINE), "uint256 amount = _value . mul ( uint256 ( cnt ) ) ;");
        assert_eq!(unit_text(UHUB_TOKEN, UHUB_LINE), "balanceOf [ _receiver ] = add ( balanceOf [ _receiver ] , _amount ) ;");
        let pb = parse(PRIVATE_BANK).unwrap();
        let ef = parse(ETH_FUND).unwrap();
        assert_eq!(resolve_unit(&pb, PRIVATE_BANK_BLOCK.0, PRIVATE_BANK_BLOCK.0).unwrap().node.line_end, PRIVATE_BANK_BLOCK.1);
        assert_eq!(resolve_unit(&ef, ETH_FUND_BLOCK.0, ETH_FUND_BLOCK.0).unwrap().node.line_end, ETH_FUND_BLOCK.1);
    }
}
