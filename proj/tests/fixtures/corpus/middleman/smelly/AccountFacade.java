package corpus.middleman.smelly;

public class AccountFacade {
    private Ledger ledger;

    public AccountFacade(Ledger ledger) {
        this.ledger = ledger;
    }

    public long balance(String account) {
        return ledger.balance(account);
    }

    public void deposit(String account, long amount) {
        ledger.post(account, amount);
    }

    public void withdraw(String account, long amount) {
        ledger.post(account, -amount);
    }

    public int entries(String account) {
        return ledger.count(account);
    }
}

class Ledger {
    private long total;
    private int postings;

    public long balance(String account) {
        return account.isEmpty() ? 0 : total;
    }

    public void post(String account, long amount) {
        total += amount;
        postings++;
    }

    public int count(String account) {
        return account.isEmpty() ? 0 : postings;
    }
}
