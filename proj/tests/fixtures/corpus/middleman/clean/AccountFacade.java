package corpus.middleman.clean;

public class AccountFacade {
    private Ledger ledger;
    private int rejected;

    public AccountFacade(Ledger ledger) {
        this.ledger = ledger;
    }

    public long balance(String account) {
        return ledger.balance(account);
    }

    public void deposit(String account, long amount) {
        if (amount <= 0) {
            rejected++;
            return;
        }
        ledger.post(account, amount);
    }

    public void withdraw(String account, long amount) {
        if (amount > ledger.balance(account)) {
            rejected++;
            return;
        }
        ledger.post(account, -amount);
    }

    public String summary(String account) {
        return account + ": " + ledger.balance(account) + " / " + rejected;
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
