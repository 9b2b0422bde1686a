package org.demo;

import java.util.List;

/**
 * A ledger account.
 */
public class Account {
    private final String uid;
    private String name;
    private long balance, limit;

    public Account(String uid, String name) {
        this.uid = uid;
        this.name = name;
    }

    public String getName() {
        return name;
    }

    // rename the account
    public void setName(String name) {
        this.name = name;
    }

    public long total(List<Long> amounts) {
        long sum = 0;
        for (long a : amounts) {
            sum += a;
        }
        return sum;
    }
}
